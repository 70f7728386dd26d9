#pragma once

// Klainerman-Machedon board game counting. A map mu on {k+1, ..., k+j} is
// admissible when 1 <= mu(l) < l and reduced when additionally nondecreasing.
// Reduced maps inject into strictly increasing sequences in
// {1, ..., k+2j-2} via s(a) = mu(k+a) + a - 1.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsrate/error.hpp"

namespace nlsrate {

struct AdmissibleMap {
    int k;
    int j;
    std::vector<int> values;  ///< values[a] = mu(k + 1 + a)

    int operator()(int l) const { return values.at(static_cast<std::size_t>(l - k - 1)); }

    bool admissible() const {
        for (int a = 0; a < j; ++a) {
            const int v = values[static_cast<std::size_t>(a)];
            if (v < 1 || v >= k + 1 + a) return false;
        }
        return true;
    }

    bool reduced() const {
        for (std::size_t a = 1; a < values.size(); ++a)
            if (values[a - 1] > values[a]) return false;
        return true;
    }

    friend bool operator==(const AdmissibleMap&, const AdmissibleMap&) = default;
};

inline constexpr int boardgame_max_index = 8;
inline constexpr std::uint64_t enumeration_limit = 10'000'000;

inline void check_boardgame_range(int k, int j) {
    if (k < 1 || k > boardgame_max_index || j < 1 || j > boardgame_max_index)
        throw RangeError("board game indices must satisfy 1 <= k, j <= " + std::to_string(boardgame_max_index) +
                         ", got k = " + std::to_string(k) + ", j = " + std::to_string(j));
}

inline std::uint64_t binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    std::uint64_t c = 1;
    for (int i = 1; i <= r; ++i) c = c * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
    return c;
}

/// prod_{l=k+1}^{k+j} (l - 1)
inline std::uint64_t admissible_count(int k, int j) {
    check_boardgame_range(k, j);
    std::uint64_t c = 1;
    for (int l = k + 1; l <= k + j; ++l) c *= static_cast<std::uint64_t>(l - 1);
    return c;
}

inline std::uint64_t catalan_bound(int k, int j) { return binomial(k + 2 * j - 2, j); }
inline std::uint64_t power_bound(int k, int j) { return std::uint64_t{1} << (k + 2 * j - 2); }

/// Visits every admissible map in lexicographic order without storing them.
template <typename Fn>
void for_each_admissible(int k, int j, Fn&& fn) {
    check_boardgame_range(k, j);
    AdmissibleMap m{k, j, std::vector<int>(static_cast<std::size_t>(j), 1)};
    for (;;) {
        fn(static_cast<const AdmissibleMap&>(m));
        int a = j - 1;
        while (a >= 0 && m.values[static_cast<std::size_t>(a)] == k + a) {
            m.values[static_cast<std::size_t>(a)] = 1;
            --a;
        }
        if (a < 0) return;
        ++m.values[static_cast<std::size_t>(a)];
    }
}

/// Materialized enumeration, refused when it would exceed 10^7 maps.
inline std::vector<AdmissibleMap> enumerate_admissible(int k, int j) {
    const std::uint64_t n = admissible_count(k, j);
    if (n > enumeration_limit)
        throw RangeError("enumerating " + std::to_string(n) + " admissible maps for (k, j) = (" + std::to_string(k) +
                         ", " + std::to_string(j) + ") exceeds the limit of " + std::to_string(enumeration_limit) +
                         "; use for_each_admissible");
    std::vector<AdmissibleMap> out;
    out.reserve(static_cast<std::size_t>(n));
    for_each_admissible(k, j, [&](const AdmissibleMap& m) { out.push_back(m); });
    return out;
}

/// Visits nondecreasing admissible maps only.
template <typename Fn>
void for_each_reduced(int k, int j, Fn&& fn) {
    check_boardgame_range(k, j);
    AdmissibleMap m{k, j, std::vector<int>(static_cast<std::size_t>(j), 1)};
    auto rec = [&](auto&& self, int a, int lo) -> void {
        if (a == j) {
            fn(static_cast<const AdmissibleMap&>(m));
            return;
        }
        for (int v = lo; v <= k + a; ++v) {
            m.values[static_cast<std::size_t>(a)] = v;
            self(self, a + 1, v);
        }
    };
    rec(rec, 0, 1);
}

/// Number of reduced maps, memoized over the board-game range.
inline std::uint64_t count_reduced(int k, int j) {
    check_boardgame_range(k, j);
    // ways[a][v]: completions from position a given the previous value v.
    std::vector<std::vector<std::uint64_t>> ways(static_cast<std::size_t>(j + 1),
                                                 std::vector<std::uint64_t>(static_cast<std::size_t>(k + j + 1), 0));
    for (int v = 1; v <= k + j; ++v) ways[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)] = 1;
    for (int a = j - 1; a >= 0; --a)
        for (int v = 1; v <= k + j; ++v) {
            std::uint64_t s = 0;
            for (int w = v; w <= k + a; ++w) s += ways[static_cast<std::size_t>(a + 1)][static_cast<std::size_t>(w)];
            ways[static_cast<std::size_t>(a)][static_cast<std::size_t>(v)] = s;
        }
    return ways[0][1];
}

/// s(a) = mu(k + a) + a - 1, a = 1..j
inline std::vector<int> map_to_sequence(const AdmissibleMap& mu) {
    if (!mu.admissible()) throw PreconditionError("map_to_sequence: map is not admissible");
    if (!mu.reduced()) throw PreconditionError("map_to_sequence: map is not reduced (nondecreasing)");
    std::vector<int> s(mu.values.size());
    for (std::size_t a = 0; a < s.size(); ++a) s[a] = mu.values[a] + static_cast<int>(a);
    return s;
}

/// mu(k + a) = s(a) - a + 1, or nullopt when admissibility fails.
inline std::optional<AdmissibleMap> sequence_to_map(const std::vector<int>& s, int k, int j) {
    check_boardgame_range(k, j);
    if (static_cast<int>(s.size()) != j)
        throw PreconditionError("sequence_to_map: sequence length must equal j");
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (s[a] < 1 || s[a] > k + 2 * j - 2)
            throw PreconditionError("sequence_to_map: entries must lie in {1, ..., k + 2j - 2}");
        if (a > 0 && s[a] <= s[a - 1]) throw PreconditionError("sequence_to_map: sequence is not strictly increasing");
    }
    AdmissibleMap m{k, j, std::vector<int>(s.size())};
    for (std::size_t a = 0; a < s.size(); ++a) m.values[a] = s[a] - static_cast<int>(a);
    if (!m.admissible()) return std::nullopt;
    return m;
}

/// Strictly increasing sequences of length j in {1, ..., n}.
template <typename Fn>
void for_each_increasing(int n, int j, Fn&& fn) {
    std::vector<int> s(static_cast<std::size_t>(j));
    auto rec = [&](auto&& self, int a, int lo) -> void {
        if (a == j) {
            fn(static_cast<const std::vector<int>&>(s));
            return;
        }
        for (int v = lo; v <= n - (j - 1 - a); ++v) {
            s[static_cast<std::size_t>(a)] = v;
            self(self, a + 1, v + 1);
        }
    };
    rec(rec, 0, 1);
}

struct BoardgameRow {
    int k;
    int j;
    std::uint64_t admissible;
    std::uint64_t reduced;
    std::uint64_t catalan;
    std::uint64_t power;
    std::uint64_t rejects;
    bool roundtrip;  ///< both bijection directions exact
    bool ok;         ///< reduced <= catalan <= power, reduced + rejects == catalan, roundtrip
};

/// Exhaustive verification at one (k, j).
inline BoardgameRow verify_boardgame(int k, int j) {
    BoardgameRow r{k, j, admissible_count(k, j), 0, catalan_bound(k, j), power_bound(k, j), 0, true, false};

    std::uint64_t counted = 0;
    for_each_reduced(k, j, [&](const AdmissibleMap& mu) {
        ++counted;
        const auto back = sequence_to_map(map_to_sequence(mu), k, j);
        if (!back || !(*back == mu)) r.roundtrip = false;
    });
    r.reduced = count_reduced(k, j);
    if (counted != r.reduced) r.roundtrip = false;

    std::uint64_t accepted = 0;
    for_each_increasing(k + 2 * j - 2, j, [&](const std::vector<int>& s) {
        const auto mu = sequence_to_map(s, k, j);
        if (!mu) {
            ++r.rejects;
            return;
        }
        ++accepted;
        if (!mu->reduced() || map_to_sequence(*mu) != s) r.roundtrip = false;
    });
    if (accepted != r.reduced) r.roundtrip = false;

    r.ok = r.reduced <= r.catalan && r.catalan <= r.power && r.reduced + r.rejects == r.catalan && r.roundtrip;
    return r;
}

}  // namespace nlsrate
