#include "sdgcl/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

constexpr const char* kMagic = "sdgcl-checkpoint";
constexpr int kVersion = 1;

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
  throw InputError("corrupt checkpoint " + path.string() + ": " + what);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  const ModelDims dims = params.dims();
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << dims.num_nodes << ' ' << dims.input_dim << ' ' << dims.hidden_dim << ' '
      << dims.embed_dim << ' ' << dims.num_layers << '\n';
  char buffer[64];
  for (const auto& slot : params.slots()) {
    out << "tensor " << slot.name << ' ' << slot.values.size() << '\n';
    for (Index i = 0; i < slot.values.size(); ++i) {
      const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), slot.values(i));
      (void)ec;
      if (i > 0) out << ' ';
      out.write(buffer, end - buffer);
    }
    out << '\n';
  }
  out << "end\n";
  if (!out) throw InputError("write failed for " + path.string());
}

EncoderParams load_checkpoint(const std::filesystem::path& path, const std::optional<ModelDims>& expected) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint " + path.string());

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) corrupt(path, "bad header");
  if (version != kVersion) corrupt(path, "unsupported version " + std::to_string(version));

  std::string tag;
  ModelDims dims;
  if (!(in >> tag >> dims.num_nodes >> dims.input_dim >> dims.hidden_dim >> dims.embed_dim >>
        dims.num_layers) ||
      tag != "dims") {
    corrupt(path, "bad dims line");
  }
  try {
    dims.validate();
  } catch (const InputError& e) {
    corrupt(path, e.what());
  }
  if (expected && !(*expected == dims)) {
    throw InputError("checkpoint " + path.string() + " has " + std::to_string(dims.num_nodes) +
                     " nodes / widths " + std::to_string(dims.input_dim) + "," +
                     std::to_string(dims.hidden_dim) + "," + std::to_string(dims.embed_dim) +
                     ", which does not match the dataset/configuration");
  }

  EncoderParams params = EncoderParams::zeros(dims);
  for (auto& slot : params.slots()) {
    std::string name;
    Index size = 0;
    if (!(in >> tag >> name >> size) || tag != "tensor") corrupt(path, "expected tensor " + slot.name);
    if (name != slot.name) corrupt(path, "expected tensor " + slot.name + ", found " + name);
    if (size != slot.values.size()) corrupt(path, "size mismatch for " + name);
    std::string token;
    for (Index i = 0; i < size; ++i) {
      if (!(in >> token)) corrupt(path, "truncated tensor " + name);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) corrupt(path, "bad number in " + name);
      slot.values(i) = value;
    }
  }
  if (!(in >> tag) || tag != "end") corrupt(path, "missing end marker");
  if (!params.all_finite()) corrupt(path, "non-finite values");
  return params;
}

}  // namespace sdgcl
