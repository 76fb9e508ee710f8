#ifndef QREV_CSV_HPP
#define QREV_CSV_HPP

#include <cstdio>
#include <ostream>
#include <string>

#include "qrev/time_value.hpp"

namespace qrev {

// Deterministic CSV emission: 17 significant digits (round-trip exact for
// doubles), LF line endings, `#` comment header. Identical inputs must give
// byte-identical files.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void field(const std::string& s) {
        sep();
        out_ << s;
    }
    void field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        sep();
        out_ << buf;
    }
    void field(int v) {
        sep();
        out_ << v;
    }
    void field(const TimeValue& t) { field(to_string(t)); }

    void end_row() {
        out_ << "\n";
        first_ = true;
    }

  private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ostream& out_;
    bool first_ = true;
};

} // namespace qrev

#endif
