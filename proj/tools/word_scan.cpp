// Dev utility: scan short words for given crossing patterns with the pants
// curves. Used to select the dual-curve panel words.
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <graftlab/surface.hpp>

using namespace graftlab;
using namespace graftlab::surface;

static std::string canonical(const Word& w) {
    // minimal string over cyclic rotations of w and its inverse
    std::string best;
    for (const Word* base : {&w}) {
        for (Word cand : {*base, inverse_word(*base)}) {
            for (size_t i = 0; i < cand.size(); ++i) {
                std::rotate(cand.begin(), cand.begin() + 1, cand.end());
                std::string s = word_to_string(cand);
                if (best.empty() || s < best) best = s;
            }
        }
    }
    return best;
}

int main(int argc, char** argv) {
    int maxlen = argc > 1 ? std::atoi(argv[1]) : 4;
    FNPoint h(1.3, 1.7, 2.1, 0.3, -0.4, 0.25);
    Holonomy rep = build_holonomy(h);
    std::cout << "relator residual: " << rep.relator_residual() << "\n";

    std::set<std::string> seen;
    std::vector<Word> words;
    std::vector<Word> frontier{{}};
    for (int len = 1; len <= maxlen; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            for (int g = 1; g <= 4; ++g) {
                for (int s : {1, -1}) {
                    int letter = s * g;
                    if (!w.empty() && w.back() == -letter) continue;
                    Word c = w;
                    c.push_back(letter);
                    next.push_back(c);
                    Word r = cyclically_reduce(c);
                    if (r.size() != c.size()) continue;
                    std::string key = canonical(r);
                    if (seen.insert(key).second) words.push_back(r);
                }
            }
        }
        frontier.swap(next);
    }
    std::cout << "candidates: " << words.size() << "\n";

    for (const Word& w : words) {
        std::array<int, 3> pat{};
        bool ok = true;
        try {
            for (int i = 0; i < 3; ++i) {
                CurveClass c("w", word_to_string(w), {0, 0, 0});
                pat[i] = geometric_intersection(rep, c, i);
            }
        } catch (const Error& e) {
            ok = false;
        }
        if (!ok) continue;
        int total = pat[0] + pat[1] + pat[2];
        if (total > 0 && total <= 4)
            std::cout << word_to_string(w) << "  ->  (" << pat[0] << "," << pat[1]
                      << "," << pat[2] << ")\n";
    }
    return 0;
}
