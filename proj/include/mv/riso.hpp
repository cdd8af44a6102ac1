#pragma once

#include <vector>

#include "mv/dsl.hpp"
#include "mv/groth.hpp"

namespace mv {

struct RtspResult {
    std::vector<std::vector<KElem>> basis;  // residue vectors in k^n
    bool certified = true;
    int dim() const { return static_cast<int>(basis.size()); }
};

// A minimal ball on which X is not riso-trivial, or a point all of whose
// neighbourhoods are.
struct RisoItem {
    bool singleton = false;
    std::vector<Series> point;  // singleton; may carry finite precision
    Ball ball;                  // ball item
    CVal cls = CVal(1);

    bool inside(const Ball& B) const;
    std::string str() const;
};

struct RisoReport {
    std::vector<RisoItem> items;
    CVal s0_class;
};

struct RisoOptions {
    int max_depth = 64;
    long hensel_precision = 40;
};

// Maximal subspace V of k^n such that X is V-riso-trivial on B.
RtspResult rtsp(const CellSet& X, const Ball& B, const RisoOptions& opt = {});
RisoReport min_nonrisotrivial(const CellSet& X, const RisoOptions& opt = {});
CVal v0(const CellSet& X, const RisoOptions& opt = {});
CVal v0_rel(const CellSet& X, const Ball& B, const RisoOptions& opt = {});
CVal v0_rel(const RisoReport& report, const Ball& B);

}  // namespace mv
