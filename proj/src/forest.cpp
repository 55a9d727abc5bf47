#include "fklab/forest.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fklab {

bool LevelProfile::colored() const {
    for (int w : white)
        if (w) return true;
    return false;
}

LevelProfile uncolored_profile(int n, int q) {
    if (n < 0 || q < 0) throw DomainError("uncolored_profile: negative size");
    return LevelProfile{std::vector<int>(n + 2, 0), std::vector<int>(n + 2, q)};
}

LevelProfile uncolored_profile(const std::vector<int>& p) {
    return LevelProfile{std::vector<int>(p.size(), 0), p};
}

BigInt profile_factorial(const LevelProfile& p) {
    BigInt r = 1;
    for (size_t L = 0; L < p.black.size(); ++L) r *= factorial(p.white[L]) * factorial(p.black[L]);
    return r;
}

void Jungle::validate() const {
    int H = profile.height();
    if (H < 0 || profile.white.size() != profile.black.size()) throw DomainError("jungle: bad profile");
    if ((int)maps.size() != H) throw DomainError("jungle: wrong number of maps");
    for (int L = 0; L < H; ++L) {
        if ((int)maps[L].size() != profile.size(L + 1)) throw DomainError("jungle: map domain size mismatch");
        for (int v : maps[L])
            if (v < 0 || v >= profile.black[L]) throw DomainError("jungle: map value out of range");
    }
}

std::vector<int> Jungle::image_sizes() const {
    std::vector<int> r;
    for (const auto& a : maps) {
        std::set<int> img(a.begin(), a.end());
        r.push_back((int)img.size());
    }
    return r;
}

Jungle make_jungle(const std::vector<std::vector<int>>& maps) {
    int q = maps.empty() ? 0 : (int)maps[0].size();
    Jungle j{uncolored_profile((int)maps.size() - 1, q), maps};
    j.validate();
    return j;
}

size_t jungle_count(const LevelProfile& p) {
    double total = 1;
    size_t exact = 1;
    for (int L = 0; L < p.height(); ++L) {
        int d = p.size(L + 1), r = p.black[L];
        for (int i = 0; i < d; ++i) {
            total *= r;
            exact *= (size_t)r;
            if (total > 1e18) return (size_t)-1;
        }
    }
    return exact;
}

void for_each_jungle(const LevelProfile& p, const std::function<void(const Jungle&)>& fn, size_t limit) {
    size_t cnt = jungle_count(p);
    if (cnt > limit) throw ResourceError("jungle enumeration exceeds the cap");
    if (cnt == 0) return;
    int H = p.height();
    Jungle j{p, {}};
    for (int L = 0; L < H; ++L) j.maps.emplace_back(p.size(L + 1), 0);
    // flattened odometer over all map entries; last entry fastest
    std::vector<std::pair<int, int>> slots;
    for (int L = 0; L < H; ++L)
        for (int i = 0; i < p.size(L + 1); ++i) slots.push_back({L, i});
    while (true) {
        fn(j);
        int s = (int)slots.size() - 1;
        while (s >= 0) {
            auto [L, i] = slots[s];
            if (++j.maps[L][i] < p.black[L]) break;
            j.maps[L][i] = 0;
            --s;
        }
        if (s < 0) break;
    }
}

bool Tree::operator<(const Tree& o) const {
    if (code.size() != o.code.size()) return code.size() < o.code.size();
    return code < o.code;
}

Tree black_leaf() { return Tree{"()"}; }
Tree white_leaf() { return Tree{"[]"}; }

Tree node(std::vector<Tree> ch) {
    std::sort(ch.begin(), ch.end());
    std::string s = "(";
    for (const auto& c : ch) s += c.code;
    s += ")";
    return Tree{s};
}

Tree wrap(const Tree& t, int m) {
    if (m < 0) throw DomainError("wrap: negative depth");
    Tree r = t;
    for (int i = 0; i < m; ++i) r = Tree{"(" + r.code + ")"};
    return r;
}

Tree chain(int h) { return wrap(black_leaf(), h); }

// Splits a concatenation of codes into the individual codes.
static std::vector<Tree> split_codes(const std::string& s, size_t begin, size_t end) {
    std::vector<Tree> out;
    size_t i = begin;
    while (i < end) {
        if (s[i] == '[') {
            if (i + 1 >= end || s[i + 1] != ']') throw DomainError("malformed tree code");
            out.push_back(white_leaf());
            i += 2;
            continue;
        }
        if (s[i] != '(') throw DomainError("malformed tree code");
        int depth = 0;
        size_t j = i;
        for (; j < end; ++j) {
            if (s[j] == '(') ++depth;
            else if (s[j] == ')') {
                if (--depth == 0) break;
            } else if (s[j] == '[') {
                if (j + 1 >= end || s[j + 1] != ']') throw DomainError("malformed tree code");
                ++j;
            } else
                throw DomainError("malformed tree code");
        }
        if (j >= end) throw DomainError("unbalanced tree code");
        out.push_back(Tree{s.substr(i, j - i + 1)});
        i = j + 1;
    }
    return out;
}

std::vector<Tree> children(const Tree& t) {
    if (t.white()) return {};
    if (t.code.size() < 2 || t.code.front() != '(' || t.code.back() != ')') throw DomainError("malformed tree code");
    return split_codes(t.code, 1, t.code.size() - 1);
}

int tree_height(const Tree& t) {
    int h = 0, depth = 0;
    for (char c : t.code) {
        if (c == '(' || c == '[') h = std::max(h, depth++);
        else
            --depth;
    }
    return h;
}

std::string Forest::text() const {
    std::string s;
    for (const auto& [t, m] : trees)
        for (int i = 0; i < m; ++i) s += t.code;
    return s;
}

int Forest::tree_count() const {
    int c = 0;
    for (const auto& tm : trees) c += tm.second;
    return c;
}

bool Forest::operator<(const Forest& o) const {
    std::string a = text(), b = o.text();
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

Forest make_forest(const std::vector<Tree>& trees) {
    std::map<std::string, int> cnt;
    for (const auto& t : trees) cnt[t.code]++;
    Forest f;
    for (const auto& [c, m] : cnt) f.trees.push_back({Tree{c}, m});
    std::sort(f.trees.begin(), f.trees.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return f;
}

static std::vector<Tree> expand(const Forest& f) {
    std::vector<Tree> v;
    for (const auto& [t, m] : f.trees)
        for (int i = 0; i < m; ++i) v.push_back(t);
    return v;
}

Forest forest_product(const Forest& a, const Forest& b) {
    auto v = expand(a);
    auto w = expand(b);
    v.insert(v.end(), w.begin(), w.end());
    return make_forest(v);
}

Forest forest_power(const Forest& f, int m) {
    if (m < 0) throw DomainError("forest_power: negative exponent");
    Forest r;
    for (int i = 0; i < m; ++i) r = forest_product(r, f);
    return r;
}

Forest parse_forest(const std::string& text) { return make_forest(split_codes(text, 0, text.size())); }

Forest canonical_forest(const Jungle& j) {
    j.validate();
    const auto& p = j.profile;
    int H = p.height();
    // codes of level L+1 vertices, in domain order (whites first)
    std::vector<std::string> upper;
    for (int i = 0; i < p.white[H]; ++i) upper.push_back("[]");
    for (int i = 0; i < p.black[H]; ++i) upper.push_back("()");
    for (int L = H - 1; L >= 0; --L) {
        std::vector<std::vector<Tree>> kids(p.black[L]);
        for (size_t i = 0; i < upper.size(); ++i) kids[j.maps[L][i]].push_back(Tree{upper[i]});
        std::vector<std::string> cur;
        for (int i = 0; i < p.white[L]; ++i) cur.push_back("[]");
        for (auto& k : kids) cur.push_back(node(std::move(k)).code);
        upper = std::move(cur);
    }
    std::vector<Tree> roots;
    for (auto& c : upper) roots.push_back(Tree{c});
    return make_forest(roots);
}

LevelProfile forest_profile(const Forest& f, int height) {
    LevelProfile p{std::vector<int>(height + 1, 0), std::vector<int>(height + 1, 0)};
    for (const auto& [t, m] : f.trees) {
        int depth = 0;
        const auto& s = t.code;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '(' || s[i] == '[') {
                if (depth > height) throw DomainError("forest is taller than the requested height");
                (s[i] == '(' ? p.black : p.white)[depth] += m;
                ++depth;
            } else
                --depth;
        }
    }
    return p;
}

std::vector<int> nonleaf_counts(const Forest& f, int height) {
    std::vector<int> r(std::max(height, 0), 0);
    for (const auto& [t, m] : f.trees) {
        int depth = 0;
        const auto& s = t.code;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '(') {
                if (i + 1 < s.size() && s[i + 1] != ')' && depth < height) r[depth] += m;
                ++depth;
            } else if (s[i] == '[')
                ++depth;
            else
                --depth;
        }
    }
    return r;
}

Jungle representative(const Forest& f, const LevelProfile& p) {
    if (forest_profile(f, p.height()) != p) throw DomainError("forest does not match the profile");
    int H = p.height();
    Jungle j{p, {}};
    // vertices of the current level as (code, parent black index)
    std::vector<std::pair<Tree, int>> level;
    for (const auto& t : expand(f)) level.push_back({t, -1});
    for (int L = 0; L <= H; ++L) {
        std::vector<int> map(p.size(L), 0);
        std::vector<std::pair<Tree, int>> next;
        int wi = 0, bi = 0;
        for (const auto& [t, parent] : level) {
            if (t.white()) {
                if (L > 0) map[wi] = parent;
                ++wi;
            } else {
                if (L > 0) map[p.white[L] + bi] = parent;
                for (const auto& c : children(t)) next.push_back({c, bi});
                ++bi;
            }
        }
        if (L > 0) j.maps.push_back(map);
        level = std::move(next);
    }
    j.validate();
    return j;
}

CoalescenceData coalescence_data(const Jungle& j) {
    CoalescenceData d;
    auto img = j.image_sizes();
    for (int L = 0; L < j.profile.height(); ++L) {
        d.sequence.push_back(j.profile.size(L + 1) - img[L]);
        d.degree += d.sequence.back();
    }
    return d;
}

CoalescenceData coalescence_data(const Forest& f, int height) {
    auto p = forest_profile(f, height);
    auto nl = nonleaf_counts(f, height);
    CoalescenceData d;
    for (int L = 0; L < height; ++L) {
        d.sequence.push_back(p.size(L + 1) - nl[L]);
        d.degree += d.sequence.back();
    }
    return d;
}

static BigInt multiplicity_factorials(const std::vector<Tree>& v) {
    std::map<std::string, int> cnt;
    for (const auto& t : v) cnt[t.code]++;
    BigInt r = 1;
    for (const auto& kv : cnt) r *= factorial(kv.second);
    return r;
}

static BigInt tree_stabilizer(const Tree& t, std::map<std::string, BigInt>& memo) {
    auto it = memo.find(t.code);
    if (it != memo.end()) return it->second;
    auto ch = children(t);
    BigInt r = multiplicity_factorials(ch);
    for (const auto& c : ch) r *= tree_stabilizer(c, memo);
    memo[t.code] = r;
    return r;
}

BigInt stabilizer_order(const Forest& f) {
    std::map<std::string, BigInt> memo;
    BigInt r = 1;
    for (const auto& [t, m] : f.trees) r *= factorial(m) * power(tree_stabilizer(t, memo), m);
    return r;
}

BigInt count_jungles(const Forest& f, const LevelProfile& p) {
    if (forest_profile(f, p.height()) != p) throw DomainError("forest does not match the profile");
    BigInt num = profile_factorial(p);
    BigInt den = stabilizer_order(f);
    return num / den;
}

// Set partitions of m items into at most k nonempty blocks, as restricted
// growth strings.
static void for_each_partition(int m, int k, const std::function<void(const std::vector<int>&, int)>& fn) {
    std::vector<int> rgs(m, 0);
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == m) {
            fn(rgs, used);
            return;
        }
        for (int b = 0; b <= std::min(used, k - 1); ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    if (m == 0) {
        fn(rgs, 0);
        return;
    }
    if (k == 0) return;
    rec(0, 0);
}

std::vector<Forest> enumerate_forests(const LevelProfile& p) {
    int H = p.height();
    if (H < 0) throw DomainError("enumerate_forests: empty profile");
    std::set<std::vector<std::string>> cur;
    {
        std::vector<std::string> top(p.white[H], "[]");
        top.insert(top.end(), p.black[H], "()");
        std::sort(top.begin(), top.end());
        cur.insert(top);
    }
    size_t work = 0;
    for (int L = H - 1; L >= 0; --L) {
        std::set<std::vector<std::string>> next;
        for (const auto& g : cur) {
            for_each_partition((int)g.size(), p.black[L], [&](const std::vector<int>& rgs, int used) {
                if (++work > 50'000'000) throw ResourceError("forest enumeration exceeds the work cap");
                std::vector<std::vector<Tree>> boxes(used);
                for (size_t i = 0; i < g.size(); ++i) boxes[rgs[i]].push_back(Tree{g[i]});
                std::vector<std::string> trees(p.white[L], "[]");
                for (auto& b : boxes) trees.push_back(node(std::move(b)).code);
                for (int i = used; i < p.black[L]; ++i) trees.push_back("()");
                std::sort(trees.begin(), trees.end());
                next.insert(std::move(trees));
            });
        }
        cur = std::move(next);
    }
    std::vector<Forest> out;
    for (const auto& g : cur) {
        std::vector<Tree> v;
        for (const auto& c : g) v.push_back(Tree{c});
        out.push_back(make_forest(v));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Forest> enumerate_forests_brute(const LevelProfile& p) {
    std::set<std::string> seen;
    std::vector<Forest> out;
    for_each_jungle(p, [&](const Jungle& j) {
        Forest f = canonical_forest(j);
        if (seen.insert(f.text()).second) out.push_back(f);
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Forest> enumerate_forests(int n, int q, const std::optional<MultiIndex>& max_coal) {
    if (q < 1) throw DomainError("enumerate_forests: q must be positive");
    auto all = enumerate_forests(uncolored_profile(n, q));
    if (!max_coal) return all;
    if ((int)max_coal->size() != n + 1) throw DomainError("coalescence bound has the wrong length");
    std::vector<Forest> out;
    for (auto& f : all) {
        auto c = coalescence_data(f, n + 1);
        if (mi_leq(c.sequence, *max_coal)) out.push_back(std::move(f));
    }
    return out;
}

} // namespace fklab
