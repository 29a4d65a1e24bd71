#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadcert/sym_matrix.hpp"

namespace quadcert {

/// Parse/validation failure for an instance file; `field` names the
/// offending entry.
class InstanceError : public std::runtime_error {
public:
    InstanceError(std::string field_name, const std::string& msg)
        : std::runtime_error(field_name + ": " + msg), field(std::move(field_name)) {}
    std::string field;
};

/// On-disk description of a quadratic system. Matrices are kept exactly as
/// read (the stated convention included) so canonical files round-trip
/// byte for byte; use full_matrices()/system_alpha() for the normalized
/// full-convention view q_i(x) = <Q_i x, x>.
struct Instance {
    int version = 1;
    Index n = 0;
    int m = 0;
    std::string convention = "full";  // "full": q = <Qx,x>; "half": q = 1/2 <Qx,x>
    std::vector<SymMatrix> matrices;  // as stored in the file
    std::optional<Vector> alpha;      // absent: alpha_i = tr Q_i implied
    bool homogeneous = false;

    /// Matrices normalized to the full convention.
    std::vector<SymMatrix> full_matrices() const;
    /// Right-hand sides in the full convention (implied traces when absent).
    Vector system_alpha() const;
};

Instance parse_instance_text(const std::string& text);
Instance load_instance(const std::string& path);

/// Canonical serialization: keys sorted, floats rendered with %.17g, one
/// matrix row per line. parse(write(x)) == x and write(parse(f)) == f for
/// canonical files.
std::string write_instance(const Instance& inst);

}  // namespace quadcert
