#ifndef TATREC_IO_HPP
#define TATREC_IO_HPP

#include "tatrec/forward.hpp"
#include "tatrec/grid.hpp"

#include <string>
#include <vector>

namespace tatrec {

/// All files are plain ASCII. Floating-point values are printed with 17
/// significant digits, so every double round-trips exactly. Lines starting
/// with '#' are provenance or commentary and are skipped by every reader.

/// Field file: a `FGRID nx ny dx origin_x origin_y` header line followed by
/// ny rows of nx values, slow index y.
void write_fgrid(const std::string& path, const ScalarField& f,
                 const std::vector<std::string>& provenance = {});
ScalarField read_fgrid(const std::string& path);

/// Trace file: a `BTRACE nt nb dt geometry_hash` header line followed by nt
/// rows of nb values in ring arc order.
void write_btrace(const std::string& path, const BoundaryTrace& trace,
                  const std::vector<std::string>& provenance = {});
BoundaryTrace read_btrace(const std::string& path);

/// Numeric table with named columns, comma separated.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> provenance;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// 17-significant-digit representation used by all writers.
std::string format_double(double v);

} // namespace tatrec

#endif
