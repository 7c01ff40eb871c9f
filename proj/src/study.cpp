#include "fanbase/study.hpp"

#include <utility>

#include "fanbase/errors.hpp"
#include "fanbase/rng.hpp"

namespace fanbase {

StudyResult run_study(const Dataset& dataset, const StudyConfig& config) {
  if (config.methods.empty() || config.resolutions.empty())
    fail(ErrorCode::InvalidConfig, "study needs at least one method and one resolution");
  if (config.modes.empty() || config.losses.empty())
    fail(ErrorCode::InvalidConfig, "study needs at least one mode and one loss");

  StudyResult result;
  for (Method method : config.methods)
    for (int resolution : config.resolutions) {
      std::vector<MethodSpec> specs;
      if (method == Method::Tensor) {
        for (TensorMode mode : config.modes)
          for (const LossSpec& loss : config.losses) {
            MethodSpec spec;
            spec.method = method;
            spec.mode = mode;
            spec.loss = loss;
            spec.fit = config.fit;
            specs.push_back(spec);
          }
      } else {
        MethodSpec spec;
        spec.method = method;
        spec.benchmark = config.benchmark;
        specs.push_back(spec);
      }
      for (const MethodSpec& spec : specs) {
        StudyCell cell;
        cell.id = method_id(spec, resolution);
        cell.spec = spec;
        cell.resolution_minutes = resolution;
        LoocvOptions options;
        options.resolution_minutes = resolution;
        options.seed = derive_seed(config.seed, cell.id);
        options.nmbe_conventional = config.nmbe_conventional;
        options.threads = config.threads;
        cell.report = loocv(dataset, spec, options);
        result.cells.push_back(std::move(cell));
      }
    }
  return result;
}

}  // namespace fanbase
