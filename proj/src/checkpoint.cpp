#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "geocert/errors.hpp"
#include "geocert/model.hpp"

// Text checkpoint, one token per whitespace-separated field:
//
//   geocert-mlp 1
//   dims <n> <d0> <d1> ... <d(n-1)>
//   layer <l> <out> <in>
//   <out rows of <in> hex-float weights>
//   <one row of <out> hex-float biases>
//   ...
//   end
//
// Weights are written with std::to_chars(hex) so they round-trip exactly.

namespace geocert {

namespace {

constexpr std::string_view kMagic = "geocert-mlp";
constexpr int kVersion = 1;

void put_hex(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  out.append(buf, res.ptr);
}

class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw DataError(std::string("checkpoint: unexpected end while reading ") + what);
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const auto tok = next(std::string(word).c_str());
    if (tok != word) {
      throw DataError("checkpoint: expected '" + std::string(word) + "', found '" +
                      std::string(tok) + "'");
    }
  }

  std::size_t size(const char* what) {
    const auto tok = next(what);
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw DataError(std::string("checkpoint: bad integer for ") + what);
    }
    return v;
  }

  double hex(const char* what) {
    auto tok = next(what);
    bool negative = false;
    if (!tok.empty() && tok.front() == '-') {
      negative = true;
      tok.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v, std::chars_format::hex);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw DataError(std::string("checkpoint: bad number for ") + what);
    }
    return negative ? -v : v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_to_string(const MlpParams& params) {
  params.validate();
  std::string out;
  out.append(kMagic).append(" ").append(std::to_string(kVersion)).append("\n");
  out.append("dims ").append(std::to_string(params.layer_dims.size()));
  for (std::size_t d : params.layer_dims) out.append(" ").append(std::to_string(d));
  out.append("\n");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const DenseLayer& L = params.layers[l];
    out.append("layer ").append(std::to_string(l)).append(" ").append(std::to_string(L.out));
    out.append(" ").append(std::to_string(L.in)).append("\n");
    for (std::size_t o = 0; o < L.out; ++o) {
      for (std::size_t i = 0; i < L.in; ++i) {
        if (i) out.push_back(' ');
        put_hex(out, L.weights[o * L.in + i]);
      }
      out.push_back('\n');
    }
    for (std::size_t o = 0; o < L.out; ++o) {
      if (o) out.push_back(' ');
      put_hex(out, L.bias[o]);
    }
    out.push_back('\n');
  }
  out.append("end\n");
  return out;
}

MlpParams checkpoint_from_string(std::string_view text) {
  Tokens tok(text);
  tok.expect(kMagic);
  const std::size_t version = tok.size("version");
  if (version != static_cast<std::size_t>(kVersion)) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  tok.expect("dims");
  const std::size_t n = tok.size("dims count");
  if (n < 2 || n > 64) throw DataError("checkpoint: implausible layer count");
  std::vector<std::size_t> dims(n);
  for (std::size_t& d : dims) d = tok.size("dim");

  MlpParams p;
  try {
    p = zero_mlp(dims);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    DenseLayer& L = p.layers[l];
    tok.expect("layer");
    if (tok.size("layer index") != l || tok.size("rows") != L.out || tok.size("cols") != L.in) {
      throw DataError("checkpoint: layer header " + std::to_string(l) + " does not match dims");
    }
    for (double& w : L.weights) w = tok.hex("weight");
    for (double& b : L.bias) b = tok.hex("bias");
  }
  tok.expect("end");
  return p;
}

void save_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(params);
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace geocert
