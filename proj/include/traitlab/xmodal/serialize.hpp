#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "traitlab/util/errors.hpp"
#include "traitlab/util/hash.hpp"
#include "traitlab/xmodal/model.hpp"

namespace traitlab::xmodal {

// Versioned binary parameter container (little-endian):
//   magic "TLXM" | u32 version | u64 manifest_len | manifest JSON
//   | u64 value_count | doubles | u64 fnv1a64(manifest + values)
// The manifest embeds the hyperparameters and the full shape census, so a
// reload rebuilds and validates the exact parameter layout.

inline constexpr std::uint32_t kParamsFormatVersion = 1;
inline constexpr char kParamsMagic[4] = {'T', 'L', 'X', 'M'};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw validation_error("params file truncated while reading " + what);
  return v;
}

inline nlohmann::json hyper_to_json(const HyperConfig& h) {
  return {{"model_dim", h.model_dim},
          {"heads", h.heads},
          {"layers", h.layers},
          {"learning_rate", h.learning_rate},
          {"epochs", h.epochs},
          {"seed", h.seed},
          {"acoustic_dim", h.acoustic_dim},
          {"textual_dim", h.textual_dim},
          {"visual_dim", h.visual_dim}};
}

inline HyperConfig hyper_from_json(const nlohmann::json& j) {
  HyperConfig h;
  h.model_dim = j.at("model_dim").get<int>();
  h.heads = j.at("heads").get<int>();
  h.layers = j.at("layers").get<int>();
  h.learning_rate = j.at("learning_rate").get<double>();
  h.epochs = j.at("epochs").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.acoustic_dim = j.at("acoustic_dim").get<int>();
  h.textual_dim = j.at("textual_dim").get<int>();
  h.visual_dim = j.at("visual_dim").get<int>();
  return h;
}

} // namespace detail

inline void save_params(const ModelParams& params, const std::string& path) {
  nlohmann::json manifest;
  manifest["hyper"] = detail::hyper_to_json(params.hyper);
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& info : parameter_census(params))
    shapes.push_back({{"name", info.name}, {"rows", info.rows}, {"cols", info.cols}});
  manifest["shapes"] = shapes;
  const std::string manifest_str = manifest.dump();

  const Eigen::VectorXd values = flatten(params);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  out.write(kParamsMagic, 4);
  detail::write_pod(out, kParamsFormatVersion);
  detail::write_pod(out, static_cast<std::uint64_t>(manifest_str.size()));
  out.write(manifest_str.data(), static_cast<std::streamsize>(manifest_str.size()));
  detail::write_pod(out, static_cast<std::uint64_t>(values.size()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(values.size())));

  std::uint64_t checksum = fnv1a64(manifest_str);
  checksum = fnv1a64(values.data(),
                     sizeof(double) * static_cast<std::size_t>(values.size()), checksum);
  detail::write_pod(out, checksum);
  if (!out) throw validation_error("failed writing params to '" + path + "'");
}

inline ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open params file '" + path + "'");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kParamsMagic, 4) != 0)
    throw validation_error("'" + path + "' is not a traitlab params file");
  const auto version = detail::read_pod<std::uint32_t>(in, "version");
  if (version != kParamsFormatVersion)
    throw validation_error("unsupported params format version " +
                           std::to_string(version));

  const auto manifest_len = detail::read_pod<std::uint64_t>(in, "manifest length");
  std::string manifest_str(manifest_len, '\0');
  in.read(manifest_str.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw validation_error("params file truncated in manifest");

  const auto n_values = detail::read_pod<std::uint64_t>(in, "value count");
  std::vector<double> values(n_values);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(sizeof(double) * n_values));
  if (!in) throw validation_error("params file truncated in values");
  const auto stored_checksum = detail::read_pod<std::uint64_t>(in, "checksum");

  std::uint64_t checksum = fnv1a64(manifest_str);
  checksum = fnv1a64(values.data(), sizeof(double) * values.size(), checksum);
  if (checksum != stored_checksum)
    throw validation_error("params file checksum mismatch in '" + path + "'");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_str);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("params manifest is not valid JSON: ") + e.what());
  }

  HyperConfig hyper = detail::hyper_from_json(manifest.at("hyper"));
  ModelParams params = init_params(hyper);

  const auto census = parameter_census(params);
  const auto& shapes = manifest.at("shapes");
  if (shapes.size() != census.size())
    throw validation_error("params manifest shape count mismatch");
  for (std::size_t i = 0; i < census.size(); ++i) {
    if (shapes[i].at("name").get<std::string>() != census[i].name ||
        shapes[i].at("rows").get<Eigen::Index>() != census[i].rows ||
        shapes[i].at("cols").get<Eigen::Index>() != census[i].cols)
      throw validation_error("params manifest shape mismatch at '" +
                             census[i].name + "'");
  }

  if (static_cast<Eigen::Index>(n_values) != parameter_count(params))
    throw validation_error("params value count does not match the manifest");
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n_values));
  for (std::size_t i = 0; i < n_values; ++i)
    flat(static_cast<Eigen::Index>(i)) = values[i];
  unflatten(flat, params);
  return params;
}

} // namespace traitlab::xmodal
