#pragma once

#include <nlohmann/json.hpp>

#include "renormlab/group_targets.hpp"
#include "renormlab/harmonic_maps.hpp"
#include "renormlab/normality.hpp"
#include "renormlab/renorm_engine.hpp"
#include "renormlab/tube.hpp"

namespace renormlab {

using Json = nlohmann::json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);   ///< list of rows
Json to_json(const CMatrix& m);           ///< list of rows of [re, im]
Json to_json(const RenormStep& s);
Json to_json(const RenormTrace& t);
Json to_json(const ConvergenceReport& r);
Json to_json(const EntireResult& r);
Json to_json(const Witness& w);
Json to_json(const NormalityReport& r);
Json to_json(const CriterionReport& r);
Json to_json(const BrodyReport& r);
Json to_json(const Evidence& e);
Json to_json(const HullResult& h);
Json to_json(const EscapeResult& e);
Json to_json(const TubeReport& r);
Json to_json(const RankProbe& r);
Json to_json(const HolomorphyWitness& w);
Json to_json(const MapRenormReport& r);
Json to_json(const ImageProbe& p);
Json to_json(const AffineLimitReport& r);
Json to_json(const TorusRenormResult& r);
Json to_json(const ConstantAdjustedResult& r);
Json to_json(const LieRenormReport& r);

}  // namespace renormlab
