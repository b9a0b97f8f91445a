#include <sstream>

#include "skpower/data_io.hpp"
#include "skpower/error.hpp"

namespace skpower::io {
namespace {

bool known_synthetic(const std::string& name) {
  return name == "polydecay" || name == "expdecay" || name == "lowrank-plus-noise";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream ss(s);
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double param(const SyntheticSource& s, const std::string& key, double fallback) {
  auto it = s.params.find(key);
  return it == s.params.end() ? fallback : it->second;
}

}  // namespace

void DatasetSpec::validate() const {
  if (const auto* s = std::get_if<SyntheticSource>(&source)) {
    if (!known_synthetic(s->name)) throw InvalidArgument("dataset: unknown synthetic '" + s->name + "'");
    if (s->m < 1 || s->n < 1) throw InvalidArgument("dataset: dimensions must be >= 1");
    if (s->name == "polydecay" && param(*s, "psd", 0.0) != 0.0 && s->m != s->n) {
      throw InvalidArgument("dataset: psd polydecay must be square");
    }
    if (s->name == "lowrank-plus-noise" && s->params.count("rank") == 0) {
      throw InvalidArgument("dataset: lowrank-plus-noise needs rank=<r>");
    }
  }
}

DenseMatrix load_dataset(const DatasetSpec& spec) {
  spec.validate();
  if (const auto* p = std::get_if<MatrixMarketSource>(&spec.source)) return read_matrix_market(p->path);
  if (const auto* p = std::get_if<BinarySource>(&spec.source)) return read_binary(p->path);
  const auto& s = std::get<SyntheticSource>(spec.source);
  if (s.name == "polydecay") {
    if (param(s, "psd", 0.0) != 0.0) return gen_psd_polydecay(s.n, s.seed);
    return gen_polydecay(s.m, s.n, s.seed);
  }
  if (s.name == "expdecay") return gen_expdecay(s.m, s.n, param(s, "rate", 0.05), s.seed);
  return gen_lowrank_plus_noise(s.m, s.n, static_cast<std::size_t>(param(s, "rank", 1.0)),
                                param(s, "noise", 0.0), s.seed);
}

DatasetSpec parse_dataset(const std::string& text) {
  DatasetSpec spec;
  spec.label = text;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (colon != std::string::npos && head == "mtx") {
    spec.source = MatrixMarketSource{text.substr(colon + 1)};
  } else if (colon != std::string::npos && head == "bin") {
    spec.source = BinarySource{text.substr(colon + 1)};
  } else if (known_synthetic(head)) {
    const auto parts = split(text, ':');
    if (parts.size() < 2) throw InvalidArgument("dataset: expected " + head + ":MxN[:seed][:key=value...]");
    SyntheticSource s;
    s.name = head;
    const auto x = parts[1].find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("dims");
      s.m = std::stoull(parts[1].substr(0, x));
      s.n = std::stoull(parts[1].substr(x + 1));
      std::size_t next = 2;
      if (parts.size() > 2 && parts[2].find('=') == std::string::npos) {
        s.seed = std::stoull(parts[2]);
        next = 3;
      }
      for (std::size_t i = next; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) throw std::invalid_argument("param");
        s.params[parts[i].substr(0, eq)] = std::stod(parts[i].substr(eq + 1));
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("dataset: cannot parse '" + text + "'");
    }
    spec.source = std::move(s);
  } else {
    std::filesystem::path path(text);
    if (path.extension() == ".mtx") {
      spec.source = MatrixMarketSource{path};
    } else {
      spec.source = BinarySource{path};
    }
  }
  spec.validate();
  return spec;
}

}  // namespace skpower::io
