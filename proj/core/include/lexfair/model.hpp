#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexfair {

using GoodId = int;
using AgentId = int;

/// Upper bound on the number of goods an instance may carry (bundles are 128-bit masks).
inline constexpr int kMaxGoods = 128;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed instance/allocation/graph document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A configured enumeration or search budget was exceeded; the answer is unknown.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// An algorithm produced an output that failed its own post-verification.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Set of goods stored as a 128-bit mask.
class Bundle {
public:
    constexpr Bundle() = default;
    Bundle(std::initializer_list<GoodId> goods);

    static Bundle first_n(int count);

    bool contains(GoodId g) const
    {
        return g < 64 ? (lo_ >> g) & 1U : (hi_ >> (g - 64)) & 1U;
    }
    void insert(GoodId g);
    void erase(GoodId g);
    Bundle with(GoodId g) const;
    Bundle without(GoodId g) const;

    int size() const { return std::popcount(lo_) + std::popcount(hi_); }
    bool empty() const { return lo_ == 0 && hi_ == 0; }
    bool subset_of(const Bundle& other) const { return (*this - other).empty(); }
    bool intersects(const Bundle& other) const { return !(*this & other).empty(); }

    /// Smallest good id in the bundle, or -1 when empty.
    GoodId lowest() const;
    std::vector<GoodId> goods() const;

    friend Bundle operator|(Bundle a, Bundle b) { return Bundle(a.lo_ | b.lo_, a.hi_ | b.hi_); }
    friend Bundle operator&(Bundle a, Bundle b) { return Bundle(a.lo_ & b.lo_, a.hi_ & b.hi_); }
    friend Bundle operator^(Bundle a, Bundle b) { return Bundle(a.lo_ ^ b.lo_, a.hi_ ^ b.hi_); }
    friend Bundle operator-(Bundle a, Bundle b) { return Bundle(a.lo_ & ~b.lo_, a.hi_ & ~b.hi_); }
    Bundle& operator|=(Bundle b) { return *this = *this | b; }

    friend bool operator==(const Bundle&, const Bundle&) = default;
    friend std::strong_ordering operator<=>(const Bundle& a, const Bundle& b)
    {
        if (auto c = a.hi_ <=> b.hi_; c != 0) {
            return c;
        }
        return a.lo_ <=> b.lo_;
    }

    std::size_t hash() const { return std::hash<std::uint64_t>{}(lo_ * 0x9E3779B97F4A7C15ULL ^ hi_); }

private:
    constexpr Bundle(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi) {}

    std::uint64_t lo_ = 0;
    std::uint64_t hi_ = 0;
};

/// Strict linear order over goods 0..m-1, most preferred first.
class Ranking {
public:
    Ranking() = default;
    /// Throws std::invalid_argument unless `order` is a permutation of 0..m-1.
    explicit Ranking(std::vector<GoodId> order);

    static Ranking identity(int m);

    int size() const { return static_cast<int>(order_.size()); }
    GoodId at(int position) const { return order_[position]; }
    GoodId top() const { return order_.front(); }
    /// 0-based position of `g`; 0 is the favourite.
    int position(GoodId g) const { return pos_[g]; }
    std::span<const GoodId> order() const { return order_; }

    bool prefers(GoodId a, GoodId b) const { return pos_[a] < pos_[b]; }

    /// Highest-ranked good of `b`, or nullopt when `b` is empty.
    std::optional<GoodId> best_in(const Bundle& b) const;
    /// The `count` highest-ranked goods of `b` (all of `b` when it is smaller).
    Bundle top_of(const Bundle& b, int count) const;
    /// The first `count` goods of the ranking.
    Bundle prefix(int count) const;
    /// The last `count` goods of the ranking.
    Bundle suffix(int count) const;

    friend bool operator==(const Ranking& a, const Ranking& b) { return a.order_ == b.order_; }

private:
    std::vector<GoodId> order_;
    std::vector<int> pos_;
};

enum class LexOrder { XbeatsY, YbeatsX, Equal };

/// Lexicographic comparison of two bundles under `r`: the highest-ranked good
/// of the symmetric difference decides.
LexOrder lex_compare(const Ranking& r, const Bundle& x, const Bundle& y);

/// True iff x is weakly preferred to y under `r`.
inline bool lex_weakly_prefers(const Ranking& r, const Bundle& x, const Bundle& y)
{
    return lex_compare(r, x, y) != LexOrder::YbeatsX;
}

/// 1-based rank of `g` in `r`. Throws std::out_of_range for unknown goods.
int rank_of(const Ranking& r, GoodId g);

/// Agents, goods and one strict ranking per agent.
class Instance {
public:
    Instance() = default;
    /// Throws std::invalid_argument when the profile is empty, a ranking does not
    /// range over exactly `labels.size()` goods, or labels are not unique.
    Instance(std::vector<std::string> labels, std::vector<Ranking> profile);
    /// Labels default to g1..gm.
    explicit Instance(std::vector<Ranking> profile);

    int num_agents() const { return static_cast<int>(profile_.size()); }
    int num_goods() const { return static_cast<int>(labels_.size()); }
    const Ranking& ranking(AgentId i) const { return profile_[i]; }
    const std::vector<Ranking>& profile() const { return profile_; }
    const std::string& label(GoodId g) const { return labels_[g]; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<GoodId> find_good(std::string_view label) const;
    Bundle all_goods() const { return Bundle::first_n(num_goods()); }

    /// Same goods and labels, different profile.
    Instance with_profile(std::vector<Ranking> profile) const;
    Instance with_ranking(AgentId i, Ranking r) const;

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<Ranking> profile_;
};

std::vector<std::string> default_labels(int m);

/// Instance where every agent shares the ranking g1 > g2 > ... > gm.
Instance identical_instance(int n, int m);

/// n pairwise-disjoint bundles; goods not in any bundle are unassigned.
class Allocation {
public:
    Allocation() = default;
    explicit Allocation(int n) : bundles_(n) {}
    /// Throws std::invalid_argument when bundles overlap.
    explicit Allocation(std::vector<Bundle> bundles);

    int num_agents() const { return static_cast<int>(bundles_.size()); }
    const Bundle& bundle(AgentId i) const { return bundles_[i]; }
    std::span<const Bundle> bundles() const { return bundles_; }

    /// Throws std::invalid_argument when `g` is already assigned.
    void assign(GoodId g, AgentId i);
    void give(AgentId i, const Bundle& goods);
    void unassign(GoodId g);

    Bundle assigned() const;
    std::optional<AgentId> owner(GoodId g) const;
    bool is_complete(const Instance& inst) const { return assigned() == inst.all_goods(); }

    friend bool operator==(const Allocation&, const Allocation&) = default;
    friend auto operator<=>(const Allocation& a, const Allocation& b) { return a.bundles_ <=> b.bundles_; }

private:
    std::vector<Bundle> bundles_;
};

/// Throws std::invalid_argument unless `a` has one bundle per agent and only
/// references goods of `inst`.
void validate_allocation(const Instance& inst, const Allocation& a);

using PickingSequence = std::vector<AgentId>;

// ---- text formats -------------------------------------------------------

Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);

Allocation parse_allocation(const Instance& inst, std::string_view text);
std::string serialize_allocation(const Instance& inst, const Allocation& a);

/// Reads a whole file; throws Error on I/O failure.
std::string read_file(const std::string& path);

// ---- small-domain enumeration --------------------------------------------

inline constexpr std::uint64_t kDefaultProfileBudget = 2'000'000;
inline constexpr std::uint64_t kDefaultAllocationBudget = 50'000'000;

/// All m! rankings of m goods in lexicographic order, with index lookup.
class RankingDomain {
public:
    explicit RankingDomain(int m);

    int num_goods() const { return m_; }
    std::uint64_t size() const { return rankings_.size(); }
    const Ranking& at(std::uint64_t index) const { return rankings_[index]; }
    std::uint64_t index_of(const Ranking& r) const;

private:
    int m_;
    std::vector<Ranking> rankings_;
};

/// Streams each of the (m!)^n profiles of L^n exactly once, in mixed-radix order
/// (agent 0 is the most significant digit).
class ProfileEnumerator {
public:
    ProfileEnumerator(int n, int m, std::uint64_t budget = kDefaultProfileBudget);

    std::uint64_t size() const { return size_; }
    const RankingDomain& domain() const { return domain_; }
    std::optional<Instance> next();
    Instance at(std::uint64_t index) const;

private:
    int n_;
    RankingDomain domain_;
    std::uint64_t size_;
    std::uint64_t cursor_ = 0;
    std::vector<std::string> labels_;
};

/// Streams every complete allocation (n^m of them), or every partial allocation
/// as well ((n+1)^m) when `complete_only` is false.
class AllocationEnumerator {
public:
    AllocationEnumerator(const Instance& inst, bool complete_only,
                         std::uint64_t budget = kDefaultAllocationBudget);

    std::uint64_t size() const { return size_; }
    std::optional<Allocation> next();

private:
    int n_;
    int m_;
    int radix_;
    std::uint64_t size_;
    std::uint64_t produced_ = 0;
    std::vector<int> digits_;
};

/// Saturating product helper for budget computations.
std::uint64_t checked_pow(std::uint64_t base, int exponent, std::uint64_t cap);
std::uint64_t factorial(int m);

} // namespace lexfair

template <>
struct std::hash<lexfair::Bundle> {
    std::size_t operator()(const lexfair::Bundle& b) const noexcept { return b.hash(); }
};
