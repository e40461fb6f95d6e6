#include "sgntk/network_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sgntk/errors.hpp"

namespace sgntk {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'S', 'G', 'N', 'T', 'K', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary format assumes little-endian hosts");

json config_json(const NetworkConfig& c) {
  return {{"widths", c.widths},   {"sigma_w", c.sigma_w},   {"sigma_b", c.sigma_b},
          {"kappa", c.kappa},     {"activation", c.activation.name}, {"seed", c.seed}};
}

NetworkConfig config_from(const json& j) {
  try {
    NetworkConfig c;
    c.widths = j.at("widths").get<std::vector<std::size_t>>();
    c.sigma_w = j.at("sigma_w").get<double>();
    c.sigma_b = j.at("sigma_b").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.activation = parse_activation(j.at("activation").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    raise(Errc::SchemaMismatch, std::string("network config: ") + e.what());
  }
}

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) raise(Errc::ParseError, "truncated network file");
  return v;
}

}  // namespace

std::string network_to_json(const Network& net) {
  json layers = json::array();
  for (const Layer& layer : net.layers()) {
    const auto w = layer.weights.entries();
    layers.push_back({{"weights", std::vector<double>(w.begin(), w.end())}, {"biases", layer.biases}});
  }
  return json{{"config", config_json(net.config())}, {"layers", layers}}.dump(1);
}

Network network_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(Errc::ParseError, e.what());
  }
  NetworkConfig config = config_from(doc.value("config", json::object()));
  try {
    const json& layers = doc.at("layers");
    if (layers.size() != config.depth()) raise(Errc::SchemaMismatch, "layer count != depth");
    std::vector<Layer> out;
    for (std::size_t l = 1; l <= config.depth(); ++l) {
      const json& lj = layers[l - 1];
      out.push_back({Matrix(config.widths[l], config.widths[l - 1], lj.at("weights").get<std::vector<double>>()),
                     lj.at("biases").get<std::vector<double>>()});
    }
    return Network(std::move(config), std::move(out));
  } catch (const json::exception& e) {
    raise(Errc::SchemaMismatch, std::string("network layers: ") + e.what());
  }
}

void write_network_binary(const Network& net, std::ostream& out) {
  const std::string header = config_json(net.config()).dump();
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const std::vector<double> flat = net.parameters();
  out.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!out) raise(Errc::InvalidArgument, "failed to write network");
}

Network read_network_binary(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    raise(Errc::ParseError, "not a network file");
  }
  if (take<std::uint32_t>(in) != kVersion) raise(Errc::SchemaMismatch, "unsupported network file version");
  const auto length = take<std::uint64_t>(in);
  if (length > (1u << 20)) raise(Errc::ParseError, "network header too long");
  std::string header(length, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(length))) raise(Errc::ParseError, "truncated header");
  json doc;
  try {
    doc = json::parse(header);
  } catch (const json::parse_error& e) {
    raise(Errc::ParseError, e.what());
  }
  NetworkConfig config = config_from(doc);
  std::vector<Layer> zeros;
  for (std::size_t l = 1; l <= config.depth(); ++l) {
    zeros.push_back({Matrix(config.widths[l], config.widths[l - 1]), std::vector<double>(config.widths[l])});
  }
  Network restored(std::move(config), std::move(zeros));
  std::vector<double> flat(restored.config().parameter_count());
  if (!in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)))) {
    raise(Errc::ParseError, "truncated parameters");
  }
  restored.set_parameters(flat);
  return restored;
}

}  // namespace sgntk
