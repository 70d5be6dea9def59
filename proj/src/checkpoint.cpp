#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "poropinn/errors.hpp"
#include "poropinn/training.hpp"

// Text checkpoint layout:
//
//   POROPINN-CKPT v1
//   spec <input_dim> <hidden_layers> <hidden_units> <output_dim>
//   params
//   layer <l> <rows> <cols>
//   <cols weights>            (one line per row)
//   <rows biases>
//   ...
//   adam <step_count> | adam none
//   moment1 / moment2         (each followed by the same layer blocks)
//   end
//
// Values are printed with 17 significant digits, which round-trips doubles.

namespace poropinn {

namespace {

void write_blocks(std::ostream& os, const ParamBlocks& blocks) {
  for (std::size_t l = 0; l < blocks.layer_count(); ++l) {
    const auto& s = blocks.shape(l);
    fmt::print(os, "layer {} {} {}\n", l, s.rows, s.cols);
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t k = 0; k < s.cols; ++k) fmt::print(os, "{}{:.17g}", k ? " " : "", blocks.weight(l, i, k));
      os << '\n';
    }
    for (std::size_t i = 0; i < s.rows; ++i) fmt::print(os, "{}{:.17g}", i ? " " : "", blocks.bias(l, i));
    os << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::string next(const char* expecting) {
    std::string line;
    if (!std::getline(is_, line)) {
      throw ParseError(fmt::format("unexpected end of checkpoint, expected {}", expecting), line_ + 1);
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  int line() const { return line_; }

  std::vector<std::string> tokens(const char* expecting) {
    std::istringstream ss(next(expecting));
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
  }

  std::vector<double> numbers(std::size_t count, const char* expecting) {
    const auto toks = tokens(expecting);
    if (toks.size() != count) {
      throw ParseError(fmt::format("expected {} values for {}, found {}", count, expecting, toks.size()), line_);
    }
    std::vector<double> out;
    for (const auto& tok : toks) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(fmt::format("malformed number '{}'", tok), line_);
      }
      if (!std::isfinite(v)) throw ValidationError(fmt::format("line {}: non-finite value", line_));
      out.push_back(v);
    }
    return out;
  }

 private:
  std::istream& is_;
  int line_ = 0;
};

long long parse_int(const std::string& tok, int line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(fmt::format("malformed integer '{}'", tok), line);
  }
  return v;
}

void expect_keyword(LineReader& in, const char* keyword) {
  const auto toks = in.tokens(keyword);
  if (toks.size() != 1 || toks[0] != keyword) throw ParseError(fmt::format("expected '{}'", keyword), in.line());
}

void read_blocks(LineReader& in, ParamBlocks& blocks) {
  for (std::size_t l = 0; l < blocks.layer_count(); ++l) {
    const auto& s = blocks.shape(l);
    const auto head = in.tokens("layer header");
    if (head.size() != 4 || head[0] != "layer") throw ParseError("expected 'layer <l> <rows> <cols>'", in.line());
    const auto idx = parse_int(head[1], in.line());
    const auto rows = parse_int(head[2], in.line());
    const auto cols = parse_int(head[3], in.line());
    if (idx != static_cast<long long>(l) || rows != static_cast<long long>(s.rows) ||
        cols != static_cast<long long>(s.cols)) {
      throw ValidationError(fmt::format("line {}: layer block {} {}x{} does not match the declared network (layer {} is {}x{})",
                                        in.line(), idx, rows, cols, l, s.rows, s.cols));
    }
    for (std::size_t i = 0; i < s.rows; ++i) {
      const auto row = in.numbers(s.cols, "weight row");
      for (std::size_t k = 0; k < s.cols; ++k) blocks.weight(l, i, k) = row[k];
    }
    const auto b = in.numbers(s.rows, "bias row");
    for (std::size_t i = 0; i < s.rows; ++i) blocks.bias(l, i) = b[i];
  }
}

}  // namespace

void write_checkpoint(std::ostream& os, const MlpParams& params, const AdamState* state) {
  const auto& spec = params.spec();
  os << kCheckpointHeader << '\n';
  fmt::print(os, "spec {} {} {} {}\n", spec.input_dim, spec.hidden_layers, spec.hidden_units, spec.output_dim);
  os << "params\n";
  write_blocks(os, params);
  if (state) {
    fmt::print(os, "adam {}\n", state->step_count);
    os << "moment1\n";
    write_blocks(os, state->first_moment);
    os << "moment2\n";
    write_blocks(os, state->second_moment);
  } else {
    os << "adam none\n";
  }
  os << "end\n";
}

Checkpoint read_checkpoint(std::istream& is) {
  LineReader in(is);
  const auto header = in.next("header");
  if (header != kCheckpointHeader) {
    if (header.rfind("POROPINN-CKPT ", 0) == 0) {
      throw ParseError(fmt::format("unsupported checkpoint version '{}' (expected v1)", header.substr(14)), 1);
    }
    throw ParseError("not a checkpoint file (missing POROPINN-CKPT header)", 1);
  }
  const auto spec_toks = in.tokens("spec line");
  if (spec_toks.size() != 5 || spec_toks[0] != "spec") {
    throw ParseError("expected 'spec <input> <hidden_layers> <hidden_units> <output>'", in.line());
  }
  LayerSpec spec;
  spec.input_dim = static_cast<int>(parse_int(spec_toks[1], in.line()));
  spec.hidden_layers = static_cast<int>(parse_int(spec_toks[2], in.line()));
  spec.hidden_units = static_cast<int>(parse_int(spec_toks[3], in.line()));
  spec.output_dim = static_cast<int>(parse_int(spec_toks[4], in.line()));
  try {
    validate(spec);
  } catch (const DimensionError& e) {
    throw ValidationError(fmt::format("line {}: {}", in.line(), e.what()));
  }

  Checkpoint ckpt{MlpParams(spec), std::nullopt};
  expect_keyword(in, "params");
  read_blocks(in, ckpt.params);

  const auto adam = in.tokens("adam line");
  if (adam.size() != 2 || adam[0] != "adam") throw ParseError("expected 'adam <steps>' or 'adam none'", in.line());
  if (adam[1] != "none") {
    AdamState state(spec);
    const auto steps = parse_int(adam[1], in.line());
    if (steps < 0) throw ValidationError(fmt::format("line {}: negative Adam step count", in.line()));
    state.step_count = static_cast<std::uint64_t>(steps);
    expect_keyword(in, "moment1");
    read_blocks(in, state.first_moment);
    expect_keyword(in, "moment2");
    read_blocks(in, state.second_moment);
    for (double v : state.second_moment.values()) {
      if (v < 0.0) throw ValidationError("Adam second moment has a negative entry");
    }
    ckpt.adam = std::move(state);
  }
  expect_keyword(in, "end");
  return ckpt;
}

void save_checkpoint(const MlpParams& params, const AdamState* state, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open checkpoint for writing: " + path);
  write_checkpoint(os, params, state);
  if (!os) throw UsageError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open checkpoint: " + path);
  return read_checkpoint(is);
}

}  // namespace poropinn
