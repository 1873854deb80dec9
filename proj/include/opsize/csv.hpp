#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsize/chain.hpp"
#include "opsize/version.hpp"

namespace opsize {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_int(i64 v) { return std::to_string(v); }

struct CsvMeta {
  std::string command;
  std::string config_hash;
  u64 seed = 0;
};

// Tidy-format writer.  Every file opens with '#'-prefixed provenance lines
// (version, command, config hash, seed) so a rerun can be checked byte for
// byte.  Timestamps and thread counts stay out on purpose.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const CsvMeta& meta)
      : out_(path), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    out_ << "# opsize " << kVersion << "\n";
    out_ << "# command: " << meta.command << "\n";
    out_ << "# config: " << meta.config_hash << "\n";
    out_ << "# seed: " << meta.seed << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  void row(std::initializer_list<std::string> fields) {
    if (fields.size() != n_columns_)
      throw std::logic_error("csv row width does not match the header");
    size_t i = 0;
    for (const std::string& f : fields) out_ << (i++ ? "," : "") << f;
    out_ << "\n";
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
  size_t n_columns_;
};

}
