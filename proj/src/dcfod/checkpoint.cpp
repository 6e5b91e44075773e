#include "fairod/dcfod/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "fairod/errors.hpp"

namespace fairod::dcfod {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic{'F', 'A', 'I', 'R', 'O', 'D', 'C', 'K'};

void write_doubles(std::ostream& out, const double* data, Index count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, Index count, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw LoadError("checkpoint '" + path.string() + "' is truncated");
}

// Network parameters are widened to float64 on disk; the round trip through float is exact.
void write_network(std::ostream& out, const Network& net) {
  for (const auto& layer : net.layers()) {
    const Matrix w = layer.weight().template cast<double>();
    const numcore::RowVector b = layer.bias().template cast<double>();
    write_doubles(out, w.data(), w.size());
    write_doubles(out, b.data(), b.size());
  }
}

void read_network(std::istream& in, Network& net, const std::filesystem::path& path) {
  for (auto& layer : net.layers()) {
    Matrix w(layer.weight().rows(), layer.weight().cols());
    numcore::RowVector b(layer.bias().size());
    read_doubles(in, w.data(), w.size(), path);
    read_doubles(in, b.data(), b.size(), path);
    layer.weight() = w.cast<float>();
    layer.bias() = b.cast<float>();
  }
}

}  // namespace

void save_checkpoint(const DcfodModel& model, const TrainConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write checkpoint '" + path.string() + "'");
  nlohmann::json header = {
      {"config", config},
      {"input_dims", model.input_dims()},
      {"num_subgroups", model.discriminator ? model.discriminator->output_width() : 0},
      {"has_discriminator", model.discriminator.has_value()},
  };
  const std::string text = header.dump();
  const auto length = static_cast<std::uint32_t>(text.size());
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion), sizeof kCheckpointVersion);
  out.write(reinterpret_cast<const char*>(&length), sizeof length);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_network(out, model.encoder);
  write_network(out, model.decoder);
  if (model.discriminator) write_network(out, *model.discriminator);
  write_doubles(out, model.centroids.data(), model.centroids.size());
  if (!out) throw LoadError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint '" + path.string() + "'");
  std::array<char, 8> magic{};
  std::uint32_t version = 0;
  std::uint32_t length = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  if (!in || magic != kMagic) throw LoadError("'" + path.string() + "' is not a checkpoint");
  if (version != kCheckpointVersion) {
    throw LoadError("checkpoint version " + std::to_string(version) + " is not supported");
  }
  std::string text(length, '\0');
  in.read(text.data(), length);
  if (!in) throw LoadError("checkpoint '" + path.string() + "' is truncated");

  nlohmann::json header;
  TrainConfig config;
  Index input_dims = 0;
  int num_subgroups = 0;
  try {
    header = nlohmann::json::parse(text);
    config = header.at("config").get<TrainConfig>();
    input_dims = header.at("input_dims").get<Index>();
    num_subgroups = header.at("num_subgroups").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("checkpoint header: " + std::string(e.what()));
  }
  DcfodModel model = DcfodModel::build(input_dims, num_subgroups, config);
  if (model.discriminator.has_value() != header.value("has_discriminator", false)) {
    throw LoadError("checkpoint header: discriminator flag does not match mode");
  }
  read_network(in, model.encoder, path);
  read_network(in, model.decoder, path);
  if (model.discriminator) read_network(in, *model.discriminator, path);
  read_doubles(in, model.centroids.data(), model.centroids.size(), path);
  return Checkpoint{std::move(model), config};
}

}  // namespace fairod::dcfod
