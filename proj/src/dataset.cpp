#include "fairaudit/dataset.hpp"

#include <cmath>
#include <string>

#include "fairaudit/error.hpp"

namespace fairaudit {

AuditDataset::AuditDataset(std::vector<AuditRecord> records, double cutoff,
                           std::vector<CovariateKind> covariate_kinds)
    : records_(std::move(records)),
      cutoff_(cutoff),
      kinds_(std::move(covariate_kinds)) {
  if (!(cutoff_ > 0.0 && cutoff_ < 1.0)) {
    throw InputError("cutoff must lie in (0,1), got " + std::to_string(cutoff_));
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const AuditRecord& r = records_[i];
    const std::string where = "record " + std::to_string(i) + ": ";
    if (!(r.s >= 0.0 && r.s <= 1.0)) {
      throw InputError(where + "score " + std::to_string(r.s) +
                       " outside [0,1]");
    }
    if (r.a != 0 && r.a != 1) {
      throw InputError(where + "group label must be 0 or 1");
    }
    if (r.y && *r.y != 0 && *r.y != 1) {
      throw InputError(where + "outcome must be 0 or 1");
    }
    if (r.w.size() != kinds_.size()) {
      throw InputError(where + "expected " + std::to_string(kinds_.size()) +
                       " covariates, got " + std::to_string(r.w.size()));
    }
    for (double v : r.w) {
      if (!std::isfinite(v)) throw InputError(where + "non-finite covariate");
    }
    if (r.labeled()) {
      ++labeled_[index(r.a)];
    } else {
      ++unlabeled_[index(r.a)];
    }
  }
}

std::size_t AuditDataset::index(int a) {
  if (a != 0 && a != 1) throw InputError("group must be 0 or 1");
  return static_cast<std::size_t>(a);
}

double AuditDataset::labeled_proportion(int a) const {
  const std::size_t n = labeled_count();
  if (n == 0) throw InsufficientDataError("no labeled records");
  return static_cast<double>(labeled_count(a)) / static_cast<double>(n);
}

GroupSample AuditDataset::sample(int a, bool labeled) const {
  const std::size_t count = labeled ? labeled_count(a) : unlabeled_count(a);
  const auto rows = static_cast<Eigen::Index>(count);
  const auto cols = static_cast<Eigen::Index>(kinds_.size());
  GroupSample out;
  out.s.resize(rows);
  out.d.resize(rows);
  out.w.resize(rows, cols);
  if (labeled) out.y.resize(rows);
  Eigen::Index k = 0;
  for (const AuditRecord& r : records_) {
    if (r.a != a || r.labeled() != labeled) continue;
    out.s[k] = r.s;
    out.d[k] = classify(r.s);
    for (Eigen::Index j = 0; j < cols; ++j) out.w(k, j) = r.w[j];
    if (labeled) out.y[k] = *r.y;
    ++k;
  }
  return out;
}

}  // namespace fairaudit
