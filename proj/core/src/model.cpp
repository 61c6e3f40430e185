#include "lexfair/model.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace lexfair {

// ---- Bundle ---------------------------------------------------------------

Bundle::Bundle(std::initializer_list<GoodId> goods)
{
    for (GoodId g : goods) {
        insert(g);
    }
}

Bundle Bundle::first_n(int count)
{
    Bundle b;
    if (count >= 64) {
        b.lo_ = ~std::uint64_t{0};
        b.hi_ = count >= 128 ? ~std::uint64_t{0} : (std::uint64_t{1} << (count - 64)) - 1;
    } else if (count > 0) {
        b.lo_ = (std::uint64_t{1} << count) - 1;
    }
    return b;
}

void Bundle::insert(GoodId g)
{
    if (g < 0 || g >= kMaxGoods) {
        throw std::out_of_range("good id " + std::to_string(g) + " outside bundle range");
    }
    if (g < 64) {
        lo_ |= std::uint64_t{1} << g;
    } else {
        hi_ |= std::uint64_t{1} << (g - 64);
    }
}

void Bundle::erase(GoodId g)
{
    if (g < 64) {
        lo_ &= ~(std::uint64_t{1} << g);
    } else {
        hi_ &= ~(std::uint64_t{1} << (g - 64));
    }
}

Bundle Bundle::with(GoodId g) const
{
    Bundle b = *this;
    b.insert(g);
    return b;
}

Bundle Bundle::without(GoodId g) const
{
    Bundle b = *this;
    b.erase(g);
    return b;
}

GoodId Bundle::lowest() const
{
    if (lo_ != 0) {
        return std::countr_zero(lo_);
    }
    if (hi_ != 0) {
        return 64 + std::countr_zero(hi_);
    }
    return -1;
}

std::vector<GoodId> Bundle::goods() const
{
    std::vector<GoodId> out;
    out.reserve(size());
    for (std::uint64_t w = lo_; w != 0; w &= w - 1) {
        out.push_back(std::countr_zero(w));
    }
    for (std::uint64_t w = hi_; w != 0; w &= w - 1) {
        out.push_back(64 + std::countr_zero(w));
    }
    return out;
}

// ---- Ranking --------------------------------------------------------------

Ranking::Ranking(std::vector<GoodId> order) : order_(std::move(order)), pos_(order_.size(), -1)
{
    const int m = size();
    if (m > kMaxGoods) {
        throw std::invalid_argument("ranking has more than 128 goods");
    }
    for (int p = 0; p < m; ++p) {
        const GoodId g = order_[p];
        if (g < 0 || g >= m) {
            throw std::invalid_argument("ranking references good id " + std::to_string(g) + " outside 0.."
                                        + std::to_string(m - 1));
        }
        if (pos_[g] != -1) {
            throw std::invalid_argument("ranking lists good id " + std::to_string(g) + " twice");
        }
        pos_[g] = p;
    }
}

Ranking Ranking::identity(int m)
{
    std::vector<GoodId> order(m);
    std::iota(order.begin(), order.end(), 0);
    return Ranking(std::move(order));
}

std::optional<GoodId> Ranking::best_in(const Bundle& b) const
{
    if (b.empty()) {
        return std::nullopt;
    }
    for (GoodId g : order_) {
        if (b.contains(g)) {
            return g;
        }
    }
    return std::nullopt;
}

Bundle Ranking::top_of(const Bundle& b, int count) const
{
    Bundle out;
    for (GoodId g : order_) {
        if (count <= 0) {
            break;
        }
        if (b.contains(g)) {
            out.insert(g);
            --count;
        }
    }
    return out;
}

Bundle Ranking::prefix(int count) const
{
    Bundle out;
    for (int p = 0; p < std::min(count, size()); ++p) {
        out.insert(order_[p]);
    }
    return out;
}

Bundle Ranking::suffix(int count) const
{
    Bundle out;
    for (int p = std::max(0, size() - count); p < size(); ++p) {
        out.insert(order_[p]);
    }
    return out;
}

LexOrder lex_compare(const Ranking& r, const Bundle& x, const Bundle& y)
{
    const Bundle diff = x ^ y;
    if (diff.empty()) {
        return LexOrder::Equal;
    }
    const GoodId decisive = *r.best_in(diff);
    return x.contains(decisive) ? LexOrder::XbeatsY : LexOrder::YbeatsX;
}

int rank_of(const Ranking& r, GoodId g)
{
    if (g < 0 || g >= r.size()) {
        throw std::out_of_range("unknown good id " + std::to_string(g));
    }
    return r.position(g) + 1;
}

// ---- Instance / Allocation -------------------------------------------------

std::vector<std::string> default_labels(int m)
{
    std::vector<std::string> labels;
    labels.reserve(m);
    for (int g = 0; g < m; ++g) {
        labels.push_back("g" + std::to_string(g + 1));
    }
    return labels;
}

Instance::Instance(std::vector<std::string> labels, std::vector<Ranking> profile)
    : labels_(std::move(labels)), profile_(std::move(profile))
{
    if (profile_.empty()) {
        throw std::invalid_argument("instance needs at least one agent");
    }
    if (labels_.empty() || static_cast<int>(labels_.size()) > kMaxGoods) {
        throw std::invalid_argument("instance needs between 1 and 128 goods");
    }
    for (const Ranking& r : profile_) {
        if (r.size() != num_goods()) {
            throw std::invalid_argument("ranking ranges over " + std::to_string(r.size()) + " goods, expected "
                                        + std::to_string(num_goods()));
        }
    }
    std::unordered_set<std::string_view> seen;
    for (const std::string& l : labels_) {
        if (!seen.insert(l).second) {
            throw std::invalid_argument("duplicate good label '" + l + "'");
        }
    }
}

Instance::Instance(std::vector<Ranking> profile)
    : Instance(default_labels(profile.empty() ? 0 : profile.front().size()), profile)
{
}

std::optional<GoodId> Instance::find_good(std::string_view label) const
{
    for (GoodId g = 0; g < num_goods(); ++g) {
        if (labels_[g] == label) {
            return g;
        }
    }
    return std::nullopt;
}

Instance Instance::with_profile(std::vector<Ranking> profile) const
{
    return Instance(labels_, std::move(profile));
}

Instance Instance::with_ranking(AgentId i, Ranking r) const
{
    Instance copy = *this;
    copy.profile_.at(i) = std::move(r);
    return copy;
}

Instance identical_instance(int n, int m)
{
    return Instance(std::vector<Ranking>(n, Ranking::identity(m)));
}

Allocation::Allocation(std::vector<Bundle> bundles) : bundles_(std::move(bundles))
{
    Bundle seen;
    for (const Bundle& b : bundles_) {
        if (seen.intersects(b)) {
            throw std::invalid_argument("allocation bundles are not pairwise disjoint");
        }
        seen |= b;
    }
}

void Allocation::assign(GoodId g, AgentId i)
{
    if (owner(g)) {
        throw std::invalid_argument("good id " + std::to_string(g) + " is already assigned");
    }
    bundles_.at(i).insert(g);
}

void Allocation::give(AgentId i, const Bundle& goods)
{
    if (assigned().intersects(goods)) {
        throw std::invalid_argument("bundle overlaps already-assigned goods");
    }
    bundles_.at(i) |= goods;
}

void Allocation::unassign(GoodId g)
{
    for (Bundle& b : bundles_) {
        b.erase(g);
    }
}

Bundle Allocation::assigned() const
{
    Bundle all;
    for (const Bundle& b : bundles_) {
        all |= b;
    }
    return all;
}

std::optional<AgentId> Allocation::owner(GoodId g) const
{
    for (AgentId i = 0; i < num_agents(); ++i) {
        if (bundles_[i].contains(g)) {
            return i;
        }
    }
    return std::nullopt;
}

void validate_allocation(const Instance& inst, const Allocation& a)
{
    if (a.num_agents() != inst.num_agents()) {
        throw std::invalid_argument("allocation has " + std::to_string(a.num_agents()) + " bundles for "
                                    + std::to_string(inst.num_agents()) + " agents");
    }
    if (!a.assigned().subset_of(inst.all_goods())) {
        throw std::invalid_argument("allocation references goods outside the instance");
    }
}

// ---- text formats -------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

/// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text)
{
    std::vector<std::pair<int, std::string_view>> out;
    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++lineno;
        std::string_view line = trim(text.substr(start, end - start));
        if (!line.empty() && line.front() != '#') {
            out.emplace_back(lineno, line);
        }
        start = end + 1;
    }
    return out;
}

[[noreturn]] void fail(int lineno, const std::string& msg)
{
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
}

int parse_agent_index(int lineno, std::string_view tok, int n)
{
    int value = 0;
    if (tok.empty()) {
        fail(lineno, "missing agent index");
    }
    for (char c : tok) {
        if (c < '0' || c > '9') {
            fail(lineno, "bad agent index '" + std::string(tok) + "'");
        }
        value = value * 10 + (c - '0');
        if (value > 1'000'000) {
            fail(lineno, "agent index too large");
        }
    }
    if (value < 1 || value > n) {
        fail(lineno, "agent index " + std::to_string(value) + " outside 1.." + std::to_string(n));
    }
    return value - 1;
}

/// Splits "keyword i: rest" into (i, rest).
std::pair<int, std::string_view> split_indexed(int lineno, std::string_view line, std::string_view keyword, int n)
{
    std::string_view body = trim(line.substr(keyword.size()));
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) {
        fail(lineno, "expected '" + std::string(keyword) + " <agent>: ...'");
    }
    const int agent = parse_agent_index(lineno, trim(body.substr(0, colon)), n);
    return {agent, trim(body.substr(colon + 1))};
}

bool starts_with_word(std::string_view line, std::string_view word)
{
    return line.substr(0, word.size()) == word
           && (line.size() == word.size() || line[word.size()] == ' ' || line[word.size()] == '\t');
}

} // namespace

Instance parse_instance(std::string_view text)
{
    std::optional<int> n;
    std::vector<std::string> labels;
    std::vector<std::optional<Ranking>> prefs;

    for (auto [lineno, line] : content_lines(text)) {
        if (starts_with_word(line, "agents")) {
            const auto toks = split_ws(line.substr(6));
            if (toks.size() != 1) {
                fail(lineno, "expected 'agents <n>'");
            }
            try {
                n = std::stoi(toks[0]);
            } catch (const std::exception&) {
                fail(lineno, "bad agent count '" + toks[0] + "'");
            }
            if (*n < 1) {
                fail(lineno, "agent count must be at least 1");
            }
            prefs.assign(*n, std::nullopt);
        } else if (starts_with_word(line, "goods")) {
            labels = split_ws(line.substr(5));
            if (labels.empty() || static_cast<int>(labels.size()) > kMaxGoods) {
                fail(lineno, "expected between 1 and 128 goods");
            }
            for (const auto& l : labels) {
                if (l.find_first_of(">#") != std::string::npos) {
                    fail(lineno, "good label '" + l + "' contains a reserved character");
                }
            }
        } else if (starts_with_word(line, "pref")) {
            if (!n || labels.empty()) {
                fail(lineno, "'pref' before 'agents' and 'goods'");
            }
            auto [agent, body] = split_indexed(lineno, line, "pref", *n);
            if (prefs[agent]) {
                fail(lineno, "duplicate agent entry for agent " + std::to_string(agent + 1));
            }
            std::vector<GoodId> order;
            std::vector<bool> seen(labels.size(), false);
            std::size_t start = 0;
            while (start <= body.size()) {
                std::size_t end = body.find('>', start);
                if (end == std::string_view::npos) {
                    end = body.size();
                }
                const std::string_view tok = trim(body.substr(start, end - start));
                const auto it = std::find(labels.begin(), labels.end(), tok);
                if (it == labels.end()) {
                    fail(lineno, "unknown good '" + std::string(tok) + "'");
                }
                const auto g = static_cast<GoodId>(it - labels.begin());
                if (seen[g]) {
                    fail(lineno, "good '" + std::string(tok) + "' ranked twice");
                }
                seen[g] = true;
                order.push_back(g);
                start = end + 1;
            }
            if (order.size() != labels.size()) {
                fail(lineno, "incomplete ranking for agent " + std::to_string(agent + 1));
            }
            prefs[agent] = Ranking(std::move(order));
        } else {
            fail(lineno, "unrecognised line '" + std::string(line) + "'");
        }
    }
    if (!n) {
        throw ParseError("missing 'agents' line");
    }
    if (labels.empty()) {
        throw ParseError("missing 'goods' line");
    }
    std::vector<Ranking> profile;
    for (int i = 0; i < *n; ++i) {
        if (!prefs[i]) {
            throw ParseError("missing preference for agent " + std::to_string(i + 1));
        }
        profile.push_back(std::move(*prefs[i]));
    }
    try {
        return Instance(std::move(labels), std::move(profile));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::string serialize_instance(const Instance& inst)
{
    std::ostringstream out;
    out << "agents " << inst.num_agents() << '\n' << "goods";
    for (const auto& l : inst.labels()) {
        out << ' ' << l;
    }
    out << '\n';
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        out << "pref " << i + 1 << ':';
        const auto order = inst.ranking(i).order();
        for (std::size_t p = 0; p < order.size(); ++p) {
            out << (p == 0 ? " " : " > ") << inst.label(order[p]);
        }
        out << '\n';
    }
    return out.str();
}

Allocation parse_allocation(const Instance& inst, std::string_view text)
{
    Allocation a(inst.num_agents());
    std::vector<bool> seen_agent(inst.num_agents(), false);
    for (auto [lineno, line] : content_lines(text)) {
        if (!starts_with_word(line, "alloc")) {
            fail(lineno, "unrecognised line '" + std::string(line) + "'");
        }
        auto [agent, body] = split_indexed(lineno, line, "alloc", inst.num_agents());
        if (seen_agent[agent]) {
            fail(lineno, "duplicate agent entry for agent " + std::to_string(agent + 1));
        }
        seen_agent[agent] = true;
        for (const auto& tok : split_ws(body)) {
            const auto g = inst.find_good(tok);
            if (!g) {
                fail(lineno, "unknown good '" + tok + "'");
            }
            if (a.owner(*g)) {
                fail(lineno, "good '" + tok + "' assigned twice");
            }
            a.assign(*g, agent);
        }
    }
    return a;
}

std::string serialize_allocation(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    std::ostringstream out;
    for (AgentId i = 0; i < a.num_agents(); ++i) {
        out << "alloc " << i + 1 << ':';
        for (GoodId g : a.bundle(i).goods()) {
            out << ' ' << inst.label(g);
        }
        out << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- enumeration -------------------------------------------------------------------

std::uint64_t checked_pow(std::uint64_t base, int exponent, std::uint64_t cap)
{
    std::uint64_t result = 1;
    for (int e = 0; e < exponent; ++e) {
        if (base != 0 && result > cap / base) {
            return cap + 1;
        }
        result *= base;
    }
    return result;
}

std::uint64_t factorial(int m)
{
    std::uint64_t f = 1;
    for (int i = 2; i <= m; ++i) {
        f *= static_cast<std::uint64_t>(i);
    }
    return f;
}

RankingDomain::RankingDomain(int m) : m_(m)
{
    if (m < 1 || m > 10) {
        throw std::invalid_argument("ranking domain supports 1..10 goods");
    }
    std::vector<GoodId> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    rankings_.reserve(factorial(m));
    do {
        rankings_.emplace_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

std::uint64_t RankingDomain::index_of(const Ranking& r) const
{
    // Lehmer code of the permutation gives its lexicographic index.
    std::uint64_t index = 0;
    const auto order = r.order();
    for (int p = 0; p < m_; ++p) {
        int smaller_later = 0;
        for (int q = p + 1; q < m_; ++q) {
            smaller_later += order[q] < order[p] ? 1 : 0;
        }
        index += static_cast<std::uint64_t>(smaller_later) * factorial(m_ - 1 - p);
    }
    return index;
}

ProfileEnumerator::ProfileEnumerator(int n, int m, std::uint64_t budget)
    : n_(n), domain_(m), size_(checked_pow(factorial(m), n, budget)), labels_(default_labels(m))
{
    if (n < 1) {
        throw std::invalid_argument("profile enumeration needs n >= 1");
    }
    if (size_ > budget) {
        throw BudgetExceeded("(m!)^n profiles for n=" + std::to_string(n) + ", m=" + std::to_string(m)
                             + " exceeds the enumeration budget of " + std::to_string(budget));
    }
}

Instance ProfileEnumerator::at(std::uint64_t index) const
{
    std::vector<Ranking> profile(n_);
    for (int i = n_ - 1; i >= 0; --i) {
        profile[i] = domain_.at(index % domain_.size());
        index /= domain_.size();
    }
    return Instance(labels_, std::move(profile));
}

std::optional<Instance> ProfileEnumerator::next()
{
    if (cursor_ >= size_) {
        return std::nullopt;
    }
    return at(cursor_++);
}

AllocationEnumerator::AllocationEnumerator(const Instance& inst, bool complete_only, std::uint64_t budget)
    : n_(inst.num_agents()),
      m_(inst.num_goods()),
      radix_(complete_only ? n_ : n_ + 1),
      size_(checked_pow(radix_, m_, budget)),
      digits_(m_, 0)
{
    if (size_ > budget) {
        throw BudgetExceeded("allocation enumeration for n=" + std::to_string(n_) + ", m=" + std::to_string(m_)
                             + " exceeds the budget of " + std::to_string(budget));
    }
}

std::optional<Allocation> AllocationEnumerator::next()
{
    if (produced_ >= size_) {
        return std::nullopt;
    }
    Allocation a(n_);
    for (GoodId g = 0; g < m_; ++g) {
        // Digit n means "unassigned" in the partial enumeration.
        if (digits_[g] < n_) {
            a.assign(g, digits_[g]);
        }
    }
    ++produced_;
    for (int g = m_ - 1; g >= 0; --g) {
        if (++digits_[g] < radix_) {
            break;
        }
        digits_[g] = 0;
    }
    return a;
}

} // namespace lexfair
