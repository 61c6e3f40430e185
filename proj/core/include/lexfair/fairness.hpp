#pragma once

#include "lexfair/model.hpp"

#include <optional>
#include <vector>

namespace lexfair {

/// Why a fairness check failed: `envier` is unhappy with `envied`'s bundle
/// even after `removed` is taken out of it. For MMS, envier == envied and
/// `removed` is empty.
struct Witness {
    AgentId envier = 0;
    AgentId envied = 0;
    Bundle removed;

    friend bool operator==(const Witness&, const Witness&) = default;
};

struct FairnessVerdict {
    bool holds = true;
    std::optional<Witness> witness;

    static FairnessVerdict pass() { return {}; }
    static FairnessVerdict fail(Witness w) { return {false, w}; }
    explicit operator bool() const { return holds; }
};

/// True iff agent i strictly prefers A_h to A_i.
bool envies(const Instance& inst, const Allocation& a, AgentId i, AgentId h);

FairnessVerdict is_ef(const Instance& inst, const Allocation& a);

/// Definitional EFX: removing any single good from an envied bundle kills the envy.
FairnessVerdict is_efx(const Instance& inst, const Allocation& a);

/// EFX via the structural characterization: every envied agent holds exactly one good.
FairnessVerdict efx_characterization(const Instance& inst, const Allocation& a);

/// EFk. Under lexicographic preferences removing the envier's k favourite
/// goods from the envied bundle is the best possible removal, so only that set
/// is tried. Throws std::invalid_argument when k < 1.
FairnessVerdict is_ef_k(const Instance& inst, const Allocation& a, int k);

struct MmsPartition {
    std::vector<Bundle> parts;
    Bundle threshold;
};

/// The unique maximin partition of agent i: its n-1 favourite goods as
/// singletons plus the remaining goods as one part. With fewer goods than
/// agents, the threshold is the empty bundle.
MmsPartition mms_partition(const Instance& inst, AgentId i);

/// MMS via the characterization: each agent holds one of its top n-1 goods or
/// all of its bottom m-n+1 goods. Throws std::invalid_argument on partial
/// allocations.
FairnessVerdict is_mms(const Instance& inst, const Allocation& a);

/// MMS by comparing each bundle against the agent's threshold part. Partial
/// allocations are accepted.
FairnessVerdict is_mms_definitional(const Instance& inst, const Allocation& a);

/// n x n matrix; entry [i][h] is envies(i, h).
std::vector<std::vector<bool>> envy_matrix(const Instance& inst, const Allocation& a);

} // namespace lexfair
