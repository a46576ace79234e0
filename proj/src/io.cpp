#include "logsp/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace logsp::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void atomic_write_bytes(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void atomic_write_text(const fs::path& path, const std::string& content) {
  atomic_write_bytes(path, content);
}

void write_profile_csv(const fs::path& path, const RadialProfile& p, int stride) {
  std::string out = "r,Q,dQ\n";
  for (std::size_t i = 0; i < p.q.size(); i += stride)
    out += fmt(p.dr * i) + "," + fmt(p.q[i]) + "," + fmt(p.dq[i]) + "\n";
  atomic_write_text(path, out);
}

nlohmann::json profile_summary_json(const RadialProfile& p) {
  return nlohmann::json{{"q0", p.q0},
                        {"rho_star", p.rho_star},
                        {"kinetic", p.kinetic},
                        {"quartic", p.quartic}};
}

void write_field_csv(const fs::path& path, const Field2D& f) {
  std::string out = "L,n\n" + fmt(f.grid.L) + "," + std::to_string(f.grid.n) + "\n";
  const int n = f.grid.n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out += fmt(f.at(i, j));
      out += (j + 1 == n) ? '\n' : ',';
    }
  }
  atomic_write_text(path, out);
}

Field2D read_field_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("L,n", 0) != 0)
    throw IoError("bad field CSV header in " + path.string());
  if (!std::getline(in, line)) throw IoError("missing grid line in " + path.string());
  double L = 0.0;
  int n = 0;
  if (std::sscanf(line.c_str(), "%lf,%d", &L, &n) != 2)
    throw IoError("bad grid line in " + path.string());
  Grid2D g = make_grid(L, n);
  std::vector<double> v;
  v.reserve(g.size());
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
  }
  if (v.size() != g.size()) throw IoError("field CSV sample count mismatch in " + path.string());
  return wrap_field(g, std::move(v));
}

namespace {
constexpr char kFieldMagic[8] = {'L', 'O', 'G', 'S', 'P', 'F', 'L', 'D'};
constexpr char kProfileMagic[8] = {'L', 'O', 'G', 'S', 'P', 'G', 'S', 'P'};
}  // namespace

void write_field_bin(const fs::path& path, const Field2D& f) {
  std::string buf;
  const std::uint64_t n = static_cast<std::uint64_t>(f.grid.n);
  buf.append(kFieldMagic, 8);
  buf.append(reinterpret_cast<const char*>(&n), 8);
  buf.append(reinterpret_cast<const char*>(&f.grid.L), 8);
  buf.append(reinterpret_cast<const char*>(f.v.data()), f.v.size() * sizeof(double));
  atomic_write_bytes(path, buf);
}

Field2D read_field_bin(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  std::uint64_t n = 0;
  double L = 0.0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&L), 8);
  if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
    throw IoError("bad field binary header in " + path.string());
  Grid2D g = make_grid(L, static_cast<int>(n));
  std::vector<double> v(g.size());
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
  if (!in) throw IoError("truncated field binary " + path.string());
  return wrap_field(g, std::move(v));
}

Field2D read_field_auto(const fs::path& path) {
  if (path.extension() == ".csv") return read_field_csv(path);
  return read_field_bin(path);
}

nlohmann::json solve_result_json(const SolveResult& res, const SolveConfig& cfg) {
  return nlohmann::json{{"rho", cfg.rho},
                        {"L", cfg.L},
                        {"n", cfg.n},
                        {"seed", cfg.seed},
                        {"e", res.e},
                        {"mu", res.mu},
                        {"eps", res.eps},
                        {"eps_bar", res.eps_bar},
                        {"x_peak", {res.x_peak[0], res.x_peak[1]}},
                        {"residual", res.residual},
                        {"iters", res.iters},
                        {"converged", res.converged},
                        {"mass_error", res.mass_error},
                        {"min_value", res.min_value},
                        {"truncation_warning", res.truncation_warning},
                        {"energy_history", res.energy_history}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "rho,rho_frac,e,eps,eps_bar,eps_bar_pred,mu,mu_eps2,x_peak_norm,x_peak_scaled,"
      "profile_dist_inf,profile_dist_x,e_pred,decay_slope,gn,ext,residual,iters,n,L,"
      "converged,decay_flagged\n";
  for (const SweepRow& r : rows) {
    out += fmt(r.rho) + "," + fmt(r.rho_frac) + "," + fmt(r.e) + "," + fmt(r.eps) + "," +
           fmt(r.eps_bar) + "," + fmt(r.eps_bar_pred) + "," + fmt(r.mu) + "," + fmt(r.mu_eps2) +
           "," + fmt(r.x_peak_norm) + "," + fmt(r.x_peak_scaled) + "," +
           fmt(r.profile_dist_inf) + "," + fmt(r.profile_dist_x) + "," + fmt(r.e_pred) + "," +
           fmt(r.decay_slope) + "," + fmt(r.gn) + "," + fmt(r.ext) + "," + fmt(r.residual) +
           "," + std::to_string(r.iters) + "," + std::to_string(r.n) + "," + fmt(r.L) + "," +
           (r.converged ? "1" : "0") + "," + (r.decay_flagged ? "1" : "0") + "\n";
  }
  return out;
}

nlohmann::json verification_report_json(const VerificationReport& rep) {
  nlohmann::json crits = nlohmann::json::array();
  for (const CriterionResult& c : rep.criteria) {
    crits.push_back({{"id", c.id},
                     {"name", c.name},
                     {"passed", c.passed},
                     {"elapsed_s", c.elapsed_s},
                     {"measured", c.measured},
                     {"details", c.details}});
  }
  return nlohmann::json{{"criteria", crits},
                        {"all_passed", rep.all_passed},
                        {"constants",
                         {{"q0", rep.q0}, {"rho_star", rep.rho_star}, {"C_Q", rep.c_q}}}};
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series) {
  const int W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
    << "</text>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
    << H - mb << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (W + ml - mr) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << (H + mt - mb) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (H + mt - mb) / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4.0;
    const double yv = ymin + t * (ymax - ymin) / 4.0;
    o << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(xv).substr(0, 8) << "</text>\n";
    o << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 3
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(yv).substr(0, 8) << "</text>\n";
  }
  int ci = 0;
  for (const Series& s : series) {
    const char* color = colors[ci % 5];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"2.5\" fill=\""
        << color << "\"/>\n";
    o << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 * ci + 12
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << s.name
      << "</text>\n";
    ++ci;
  }
  o << "</svg>\n";
  return o.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

fs::path groundstate_cache_path(const fs::path& cache_dir, const ShootOptions& opts) {
  char key[128];
  std::snprintf(key, sizeof(key), "dr=%.17g;r_max=%.17g;tol=%.17g", opts.dr, opts.r_max,
                opts.tol);
  char name[64];
  std::snprintf(name, sizeof(name), "groundstate-%016" PRIx64 ".bin", fnv1a(key));
  return cache_dir / name;
}

namespace {

void append_scalar(std::string& buf, double v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(double));
}

double read_scalar(std::ifstream& in) {
  double v = 0.0;
  in.read(reinterpret_cast<char*>(&v), sizeof(double));
  return v;
}

}  // namespace

RadialProfile ground_state_cached(const ShootOptions& opts, const fs::path& cache_dir) {
  const fs::path path = groundstate_cache_path(cache_dir, opts);
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    if (in && std::memcmp(magic, kProfileMagic, 8) == 0) {
      RadialProfile p;
      p.dr = read_scalar(in);
      p.r_max = read_scalar(in);
      p.stitch_r = read_scalar(in);
      p.tail_amp = read_scalar(in);
      p.q0 = read_scalar(in);
      p.rho_star = read_scalar(in);
      p.kinetic = read_scalar(in);
      p.quartic = read_scalar(in);
      p.moment2 = read_scalar(in);
      p.sextic = read_scalar(in);
      const std::uint64_t m = static_cast<std::uint64_t>(read_scalar(in));
      p.q.resize(m);
      p.dq.resize(m);
      in.read(reinterpret_cast<char*>(p.q.data()), static_cast<std::streamsize>(m * 8));
      in.read(reinterpret_cast<char*>(p.dq.data()), static_cast<std::streamsize>(m * 8));
      if (in) return p;
    }
  }
  RadialProfile p = shoot_Q(opts);
  std::string buf;
  buf.append(kProfileMagic, 8);
  append_scalar(buf, p.dr);
  append_scalar(buf, p.r_max);
  append_scalar(buf, p.stitch_r);
  append_scalar(buf, p.tail_amp);
  append_scalar(buf, p.q0);
  append_scalar(buf, p.rho_star);
  append_scalar(buf, p.kinetic);
  append_scalar(buf, p.quartic);
  append_scalar(buf, p.moment2);
  append_scalar(buf, p.sextic);
  append_scalar(buf, static_cast<double>(p.q.size()));
  buf.append(reinterpret_cast<const char*>(p.q.data()), p.q.size() * 8);
  buf.append(reinterpret_cast<const char*>(p.dq.data()), p.dq.size() * 8);
  atomic_write_bytes(path, buf);
  return p;
}

}  // namespace logsp::io
