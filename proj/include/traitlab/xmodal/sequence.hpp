#pragma once

#include <string>

#include <Eigen/Dense>

#include "traitlab/util/errors.hpp"

namespace traitlab::xmodal {

enum class Modality { acoustic = 0, textual = 1, visual = 2 };

inline const char* modality_name(Modality m) {
  switch (m) {
    case Modality::acoustic: return "acoustic";
    case Modality::textual: return "textual";
    default: return "visual";
  }
}

inline Modality modality_from_name(const std::string& s) {
  if (s == "acoustic") return Modality::acoustic;
  if (s == "textual") return Modality::textual;
  if (s == "visual") return Modality::visual;
  throw validation_error("unknown modality '" + s + "'");
}

// One modality's feature matrix for a window: rows are timesteps, columns
// the modality's feature dimension (eGeMAPS 88 / BERT 768 / AU 17 by
// default).
struct ModalitySequence {
  Modality tag = Modality::acoustic;
  Eigen::MatrixXd features; // (T_m, d_m)

  void validate() const {
    if (features.rows() < 1)
      throw validation_error(std::string("ModalitySequence(") + modality_name(tag) +
                             "): needs at least one timestep");
    if (features.cols() < 1)
      throw validation_error(std::string("ModalitySequence(") + modality_name(tag) +
                             "): needs at least one feature column");
    if (!features.allFinite())
      throw validation_error(std::string("ModalitySequence(") + modality_name(tag) +
                             "): non-finite features");
  }
};

} // namespace traitlab::xmodal
