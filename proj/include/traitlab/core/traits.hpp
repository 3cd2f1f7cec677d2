#pragma once

#include <array>
#include <cmath>
#include <string>

#include "traitlab/util/errors.hpp"

namespace traitlab::core {

inline constexpr int kTraitCount = 5;

inline constexpr std::array<const char*, kTraitCount> kTraitNames = {
    "openness", "conscientiousness", "extraversion", "agreeableness",
    "emotional_stability"};

inline constexpr std::array<const char*, 2> kMetaTraitNames = {"plasticity",
                                                               "stability"};

// The five perceived trait scores on a common [0,1] scale. Emotional
// stability is the reversed neuroticism axis: a low value means high
// neuroticism.
struct TraitVector {
  double openness = 0.0;
  double conscientiousness = 0.0;
  double extraversion = 0.0;
  double agreeableness = 0.0;
  double emotional_stability = 0.0;

  double operator[](int i) const {
    switch (i) {
      case 0: return openness;
      case 1: return conscientiousness;
      case 2: return extraversion;
      case 3: return agreeableness;
      default: return emotional_stability;
    }
  }

  double& operator[](int i) {
    switch (i) {
      case 0: return openness;
      case 1: return conscientiousness;
      case 2: return extraversion;
      case 3: return agreeableness;
      default: return emotional_stability;
    }
  }

  bool is_valid() const {
    for (int i = 0; i < kTraitCount; ++i) {
      const double v = (*this)[i];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
    }
    return true;
  }

  void validate(const std::string& what = "trait vector") const {
    for (int i = 0; i < kTraitCount; ++i) {
      const double v = (*this)[i];
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw validation_error(what + ": " + kTraitNames[static_cast<std::size_t>(i)] +
                               " out of [0,1] or non-finite");
    }
  }
};

// Higher-order two-factor representation: plasticity (openness +
// extraversion) and stability (conscientiousness + agreeableness +
// emotional stability), unit weights.
struct MetaTraitVector {
  double plasticity = 0.0;
  double stability = 0.0;

  double operator[](int i) const { return i == 0 ? plasticity : stability; }
};

// Raw linear map, no range validation. The checked entry point below is the
// one callers normally want.
inline MetaTraitVector meta_traits_unchecked(const TraitVector& t) {
  return {t.openness + t.extraversion,
          t.conscientiousness + t.agreeableness + t.emotional_stability};
}

inline MetaTraitVector meta_traits(const TraitVector& t) {
  t.validate("meta_traits input");
  return meta_traits_unchecked(t);
}

// Divides each meta-trait by its number of contributing traits so both land
// in [0,1]; plotting aid, off by default.
inline MetaTraitVector normalize_meta(const MetaTraitVector& m) {
  return {m.plasticity / 2.0, m.stability / 3.0};
}

} // namespace traitlab::core
