#include "mpeig/run_record.hpp"

#include <charconv>
#include <fstream>

#include "mpeig/errors.hpp"

namespace mpeig {

namespace {

constexpr const char* kBaseHeader =
    "matrix,n,nnz,variant,k,m,seed,iters_lower,iters_working,converged,idx,"
    "theta,resid,t_factor,t_total";
constexpr const char* kBoundsHeader =
    ",kappa,eps_A,eps_r,eps_T,eps_T_vacuous,gamma_precond,norm_te_norm_a,"
    "beta_mid,gamma_total_mid,rate_mid,floor";

void append_row(std::string& out, const RunRecord& r, std::size_t j,
                bool with_bounds) {
  out += r.matrix_name;
  out += ',';
  out += std::to_string(r.n);
  out += ',';
  out += std::to_string(r.nnz);
  out += ',';
  out += r.variant;
  out += ',';
  out += std::to_string(r.k);
  out += ',';
  out += std::to_string(r.m);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += std::to_string(r.iters_lower);
  out += ',';
  out += std::to_string(r.iters_working);
  out += ',';
  out += r.converged ? '1' : '0';
  out += ',';
  out += std::to_string(j + 1);
  out += ',';
  out += format_shortest(r.theta[j]);
  out += ',';
  out += format_shortest(r.resid[j]);
  out += ',';
  out += format_shortest(r.timings.factorize);
  out += ',';
  out += format_shortest(r.timings.total);
  if (with_bounds) {
    if (r.bounds) {
      const analysis::BoundReport& b = *r.bounds;
      for (double v : {b.kappa, b.eps_A, b.eps_r, b.eps_T}) {
        out += ',';
        out += format_shortest(v);
      }
      out += ',';
      out += b.eps_T_vacuous ? '1' : '0';
      for (double v : {b.gamma_precond_meas, b.norm_te_norm_a, b.beta_mid,
                       b.gamma_total_mid, b.rate_mid, b.floor}) {
        out += ',';
        out += format_shortest(v);
      }
    } else {
      for (int c = 0; c < 11; ++c) out += ',';
    }
  }
  out += '\n';
}

void append_json_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out += '\\';
      out += ch;
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      out += ' ';
    } else {
      out += ch;
    }
  }
  out += '"';
}

void append_json_array(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_shortest(v[i]);
  }
  out += ']';
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string run_record_csv(const std::vector<RunRecord>& records) {
  bool with_bounds = false;
  for (const RunRecord& r : records) with_bounds = with_bounds || r.bounds.has_value();
  std::string out = kBaseHeader;
  if (with_bounds) out += kBoundsHeader;
  out += '\n';
  for (const RunRecord& r : records)
    for (std::size_t j = 0; j < r.theta.size(); ++j)
      append_row(out, r, j, with_bounds);
  return out;
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << run_record_csv(records);
}

std::string history_json(const std::vector<RunRecord>& records) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RunRecord& rec = records[r];
    out += "  {\"matrix\": ";
    append_json_escaped(out, rec.matrix_name);
    out += ", \"variant\": ";
    append_json_escaped(out, rec.variant);
    out += ", \"seed\": " + std::to_string(rec.seed);
    out += ", \"converged\": ";
    out += rec.converged ? "true" : "false";
    out += ", \"iterations\": [\n";
    for (std::size_t i = 0; i < rec.history.size(); ++i) {
      const IterationRecord& it = rec.history[i];
      out += "    {\"iter\": " + std::to_string(i + 1);
      out += ", \"stage\": ";
      out += it.stage == Precision::Lower ? "\"lower\"" : "\"working\"";
      out += ", \"n_converged\": " + std::to_string(it.n_converged);
      out += ", \"w_dropped\": " + std::to_string(it.w_columns_dropped);
      out += ", \"rotation_fallback\": ";
      out += it.basis_rotation_fallback ? "true" : "false";
      out += ", \"ritz\": ";
      append_json_array(out, it.ritz_values);
      out += ", \"resid\": ";
      append_json_array(out, it.residual_norms);
      out += "}";
      if (i + 1 < rec.history.size()) out += ',';
      out += '\n';
    }
    out += "  ]}";
    if (r + 1 < records.size()) out += ',';
    out += '\n';
  }
  out += "]\n";
  return out;
}

void write_history_json(const std::string& path,
                        const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << history_json(records);
}

}  // namespace mpeig
