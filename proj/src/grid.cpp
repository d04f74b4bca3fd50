#include "topopt/grid.hpp"

#include <algorithm>

namespace topopt {

BoundaryConditions::BoundaryConditions(const StructuredGrid& grid, std::vector<int> fixed_dofs,
                                       std::vector<PointLoad> loads)
    : num_dofs_(grid.num_dofs()), fixed_(std::move(fixed_dofs)), loads_(std::move(loads)) {
    std::sort(fixed_.begin(), fixed_.end());
    fixed_.erase(std::unique(fixed_.begin(), fixed_.end()), fixed_.end());

    fixed_mask_.assign(static_cast<size_t>(num_dofs_), 0);
    for (int dof : fixed_) {
        if (dof < 0 || dof >= num_dofs_)
            throw ParameterError("bc: fixed dof " + std::to_string(dof) + " out of range");
        fixed_mask_[static_cast<size_t>(dof)] = 1;
    }
    for (const auto& load : loads_) {
        if (load.dof < 0 || load.dof >= num_dofs_)
            throw ParameterError("bc: loaded dof " + std::to_string(load.dof) + " out of range");
        if (fixed_mask_[static_cast<size_t>(load.dof)])
            throw ParameterError("bc: dof " + std::to_string(load.dof) +
                                 " is fixed and carries a load");
    }
}

Eigen::VectorXd BoundaryConditions::load_vector() const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(num_dofs_);
    for (const auto& load : loads_) p[load.dof] += load.magnitude;
    return p;
}

}  // namespace topopt
