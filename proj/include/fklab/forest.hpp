#pragma once

#include "fklab/exact_num.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fklab {

// Vertex counts per level 0..H. Uncolored profiles have white == 0 everywhere.
// White vertices are leaves; only black vertices receive edges.
struct LevelProfile {
    std::vector<int> white;
    std::vector<int> black;

    int height() const { return (int)black.size() - 1; }
    int size(int level) const { return white[level] + black[level]; }
    bool colored() const;
    bool operator==(const LevelProfile& o) const = default;
};

// q vertices at each of the levels 0..n+1.
LevelProfile uncolored_profile(int n, int q);
LevelProfile uncolored_profile(const std::vector<int>& p);
BigInt profile_factorial(const LevelProfile& p);

// maps[L] sends level L+1 (whites first, then blacks) to the blacks of level L.
struct Jungle {
    LevelProfile profile;
    std::vector<std::vector<int>> maps;

    void validate() const;
    // |a_L|: number of distinct parents used by maps[L].
    std::vector<int> image_sizes() const;
};

// Constant profile jungle from plain maps a_0..a_n, all of size q.
Jungle make_jungle(const std::vector<std::vector<int>>& maps);

size_t jungle_count(const LevelProfile& p);
// Visits every jungle of the profile; throws ResourceError above limit jungles.
void for_each_jungle(const LevelProfile& p, const std::function<void(const Jungle&)>& fn,
                     size_t limit = 1'000'000);

// Canonical rooted tree: "(" + sorted child codes + ")" for black vertices and
// "[]" for a white leaf. Codes order by length then lexicographically.
struct Tree {
    std::string code;

    bool white() const { return code == "[]"; }
    bool operator==(const Tree& o) const { return code == o.code; }
    bool operator<(const Tree& o) const;
};

Tree black_leaf();
Tree white_leaf();
Tree node(std::vector<Tree> children);
// m extra black ancestors stacked above t.
Tree wrap(const Tree& t, int m);
// Black chain with h edges.
Tree chain(int h);
std::vector<Tree> children(const Tree& t);
int tree_height(const Tree& t);

// Multiset of trees in normal form, sorted by tree order.
struct Forest {
    std::vector<std::pair<Tree, int>> trees;

    std::string text() const;
    int tree_count() const;
    bool operator==(const Forest& o) const { return trees == o.trees; }
    bool operator<(const Forest& o) const;
};

Forest make_forest(const std::vector<Tree>& trees);
Forest forest_product(const Forest& a, const Forest& b);
// Repeats each tree of f m times.
Forest forest_power(const Forest& f, int m);
// Parses the concatenated canonical text.
Forest parse_forest(const std::string& text);

Forest canonical_forest(const Jungle& j);
// A jungle of the class; vertices numbered in order of appearance, so maps are
// weakly increasing within each color. Throws DomainError on profile mismatch.
Jungle representative(const Forest& f, const LevelProfile& p);
LevelProfile forest_profile(const Forest& f, int height);
// Black vertices with at least one child, per level 0..height-1.
std::vector<int> nonleaf_counts(const Forest& f, int height);

struct CoalescenceData {
    MultiIndex sequence;
    int degree = 0;
};
CoalescenceData coalescence_data(const Jungle& j);
CoalescenceData coalescence_data(const Forest& f, int height);

// Product over all vertices (plus a virtual root over the forest) of the
// factorials of identical-child multiplicities.
BigInt stabilizer_order(const Forest& f);
BigInt count_jungles(const Forest& f, const LevelProfile& p);

// Level-wise construction from the top level down.
std::vector<Forest> enumerate_forests(const LevelProfile& p);
// Canonicalizes every jungle of the profile.
std::vector<Forest> enumerate_forests_brute(const LevelProfile& p);
// Constant profile q on levels 0..n+1; optional filter c(f) <= max_coal.
std::vector<Forest> enumerate_forests(int n, int q, const std::optional<MultiIndex>& max_coal = std::nullopt);

} // namespace fklab
