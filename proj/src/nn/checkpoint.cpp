#include "gridflux/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridflux/errors.hpp"

namespace gridflux::nn {
namespace {

void write_values(std::ostream& out, std::span<const double> values) {
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

std::vector<double> read_values(std::istream& in, std::size_t n,
                                const std::string& what) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) {
      throw SchemaError("checkpoint: truncated values for " + what);
    }
    try {
      v[i] = std::stod(tok);
    } catch (const std::exception&) {
      throw SchemaError("checkpoint: bad value '" + tok + "' in " + what);
    }
  }
  return v;
}

}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << "gridflux-checkpoint 1\n";
    for (const auto& [name, net] : nets) {
      out << "net " << name << ' ' << net.layer_dims().size();
      for (int d : net.layer_dims()) out << ' ' << d;
      out << ' '
          << (net.output_activation() == OutputActivation::kTanh ? "tanh"
                                                                 : "linear")
          << '\n';
      write_values(out, net.params());
    }
    for (const auto& [name, vec] : vectors) {
      out << "vec " << name << ' ' << vec.size() << '\n';
      write_values(out, vec);
    }
    out << "end\n";
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "gridflux-checkpoint" ||
      version != 1) {
    throw SchemaError(path.string() + ": not a gridflux checkpoint");
  }
  Checkpoint ck;
  std::string kind;
  while (in >> kind) {
    if (kind == "end") return ck;
    std::string name;
    if (!(in >> name)) throw SchemaError("checkpoint: missing record name");
    if (kind == "net") {
      std::size_t n_dims = 0;
      if (!(in >> n_dims) || n_dims < 2) {
        throw SchemaError("checkpoint: bad layer count for " + name);
      }
      std::vector<int> dims(n_dims);
      for (auto& d : dims) {
        if (!(in >> d) || d < 1) {
          throw SchemaError("checkpoint: bad width for " + name);
        }
      }
      std::string act;
      in >> act;
      if (act != "linear" && act != "tanh") {
        throw SchemaError("checkpoint: bad activation for " + name);
      }
      MlpNet net(dims, act == "tanh" ? OutputActivation::kTanh
                                     : OutputActivation::kLinear);
      const auto values = read_values(in, net.param_count(), name);
      std::copy(values.begin(), values.end(), net.params().begin());
      ck.nets.emplace(name, std::move(net));
    } else if (kind == "vec") {
      std::size_t n = 0;
      if (!(in >> n)) throw SchemaError("checkpoint: bad size for " + name);
      ck.vectors.emplace(name, read_values(in, n, name));
    } else {
      throw SchemaError("checkpoint: unknown record '" + kind + "'");
    }
  }
  throw SchemaError(path.string() + ": missing end marker");
}

}  // namespace gridflux::nn
