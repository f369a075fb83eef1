#pragma once

#include <string>
#include <vector>

#include "cg.hpp"
#include "fg.hpp"

namespace ifc {

// Outcome of sweeping every closed term up to a node budget and comparing
// the algorithmic checker against the declarative derivation search.
struct EnumReport {
    long long terms = 0;       // closed terms visited
    long long checks = 0;      // comparisons run (two per fine-grained term: one per pc)
    long long typable = 0;     // checks the algorithmic side accepted
    long long mismatches = 0;  // typability disagreements, or result not derivable
    long long nonminimal = 0;  // checker result fails to sit below a derivable type
    std::vector<long long> per_size;  // terms by node count (index = size)
    std::string witness;       // first offending term, printable, with its pc

    bool clean() const { return mismatches == 0 && nonminimal == 0; }
};

// Exhaustively enumerate closed terms whose node count (expression nodes
// plus every type-annotation node) is at most maxSize, over bool/unit
// bases and the two-point lattice, and check each one both ways. Labels
// and latent annotations multiply alternatives but occupy no nodes.
// maxSize is capped at 8; past that the space outgrows any full sweep.
//
// The search side of each comparison is composed from memoized child sets
// through the per-rule combinators; the algorithmic checker always runs on
// the real term. crossCheck additionally recomputes every composed set by
// a direct walk and reports any divergence as a mismatch (slow; meant for
// small sizes).
EnumReport enum_check_fg(int maxSize, int threads = 1, bool crossCheck = false);
EnumReport enum_check_cg(int maxSize, int threads = 1, bool crossCheck = false);

// Closed terms of exactly the given node count, by pure recurrence over
// the same grammar; pins the sweep's extent independently of it.
long long enum_count_fg(int size);
long long enum_count_cg(int size);

} // namespace ifc
