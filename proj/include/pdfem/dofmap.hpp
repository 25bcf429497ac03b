#pragma once

#include <span>
#include <vector>

#include "pdfem/grid.hpp"

namespace pdfem {

/// Maps grid nodes to solve-space DOF indices. Non-periodic maps are the
/// identity. Periodic maps send every max-face node to its min-face image;
/// edge and corner nodes resolve transitively to a single master, so the map
/// is idempotent. DOFs are node-major, component-minor.
struct DofMap {
    Physics physics = Physics::thermal;
    int dofs_per_node = 1;
    long n_nodes_full = 0;
    long n_nodes_reduced = 0;
    std::vector<int> node_master;  // full node -> master full node
    std::vector<int> node_reduced; // full node -> reduced node index

    bool periodic = false;

    long dof_count() const { return n_nodes_reduced * dofs_per_node; }
    long full_dof_count() const { return n_nodes_full * dofs_per_node; }
    int reduced_dof(long node, int comp) const {
        return static_cast<int>(node_reduced[node]) * dofs_per_node + comp;
    }
    int full_dof(long node, int comp) const {
        return static_cast<int>(node) * dofs_per_node + comp;
    }

    /// Scatter a reduced vector back to the full node set (slaves copy their
    /// master's value).
    std::vector<double> expand(std::span<const double> reduced) const;
};

DofMap make_dofmap(const StructuredGrid& grid, Physics physics);

/// Periodic identification across opposite faces. Reduced node count is
/// prod(n_i); with d displacement components the reduced DOF count is
/// d * prod(n_i).
DofMap periodic_dofmap(const StructuredGrid& grid, Physics physics);

} // namespace pdfem
