#include "hopjam/error.hpp"

namespace hopjam {

void rethrow_with_context(std::exception_ptr e, const std::string& context) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    throw ConfigError(context + ": " + x.what());
  } catch (const DimensionError& x) {
    throw DimensionError(context + ": " + x.what());
  } catch (const DegenerateInputError& x) {
    throw DegenerateInputError(context + ": " + x.what());
  } catch (const ResolutionError& x) {
    throw ResolutionError(context + ": " + x.what());
  } catch (const CropError& x) {
    throw CropError(context + ": " + x.what());
  } catch (const SamplingError& x) {
    throw SamplingError(context + ": " + x.what());
  } catch (const NumericalError& x) {
    throw NumericalError(context + ": " + x.what());
  } catch (const IoError& x) {
    throw IoError(context + ": " + x.what());
  } catch (const std::exception& x) {
    throw Error(context + ": " + x.what());
  }
}

}  // namespace hopjam
