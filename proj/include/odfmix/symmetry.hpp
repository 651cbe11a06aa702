#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "odfmix/errors.hpp"
#include "odfmix/quaternion.hpp"

namespace odfmix {

/// Finite rotation group given as unit quaternions. Crystal groups act on the
/// left of an orientation, specimen groups on the right: [g] = {qc * g * qs}.
class SymmetryGroup {
public:
    SymmetryGroup() : name_("identity"), elements_{UnitQuaternion::identity()} {}
    SymmetryGroup(std::string name, std::vector<UnitQuaternion> elements);

    const std::string& name() const { return name_; }
    const std::vector<UnitQuaternion>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    const UnitQuaternion& operator[](std::size_t i) const { return elements_[i]; }

private:
    std::string name_;
    std::vector<UnitQuaternion> elements_;
};

/// Names accepted by symmetry_group().
const std::vector<std::string>& symmetry_catalog();

/// Catalog lookup. "octahedral-48" is the binary octahedral listing, where
/// q and -q both appear. Throws CatalogError for unknown names.
SymmetryGroup symmetry_group(std::string_view name);

/// Reads one quaternion per line (four whitespace-separated decimals; blank
/// lines and '#' comments skipped) and validates the group.
SymmetryGroup load_symmetry_group(const std::filesystem::path& path);

struct GroupCheck {
    bool has_identity = false;
    bool closed = false;           ///< closed under products up to sign
    bool antipodal_free = false;   ///< no two elements equal up to sign
};
GroupCheck check_group(const SymmetryGroup& g, double tol = 1e-10);

/// All J*K products qc[j] * g * qs[k], row-major in (j, k). Duplicates kept.
std::vector<UnitQuaternion> equivalence_class(const UnitQuaternion& g, const SymmetryGroup& qc,
                                              const SymmetryGroup& qs);

/// Representative of {+-[g]} with maximal w; near-ties (1e-12) are broken by
/// larger x, then y, then z.
UnitQuaternion canonicalize(const UnitQuaternion& g, const SymmetryGroup& qc,
                            const SymmetryGroup& qs);

/// Smallest misorientation angle between the classes of a and b.
double symmetric_distance(const UnitQuaternion& a, const UnitQuaternion& b,
                          const SymmetryGroup& qc, const SymmetryGroup& qs);

}  // namespace odfmix
