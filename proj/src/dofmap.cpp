#include "pdfem/dofmap.hpp"

#include <span>

namespace pdfem {

std::vector<double> DofMap::expand(std::span<const double> reduced) const {
    std::vector<double> full(full_dof_count());
    for (long node = 0; node < n_nodes_full; ++node)
        for (int c = 0; c < dofs_per_node; ++c)
            full[full_dof(node, c)] = reduced[reduced_dof(node, c)];
    return full;
}

DofMap make_dofmap(const StructuredGrid& grid, Physics physics) {
    DofMap m;
    m.physics = physics;
    m.dofs_per_node = dofs_per_node(physics, grid.dim());
    m.n_nodes_full = m.n_nodes_reduced = grid.node_count();
    m.node_master.resize(m.n_nodes_full);
    m.node_reduced.resize(m.n_nodes_full);
    for (long i = 0; i < m.n_nodes_full; ++i) {
        m.node_master[i] = static_cast<int>(i);
        m.node_reduced[i] = static_cast<int>(i);
    }
    return m;
}

DofMap periodic_dofmap(const StructuredGrid& grid, Physics physics) {
    DofMap m;
    m.physics = physics;
    m.periodic = true;
    m.dofs_per_node = dofs_per_node(physics, grid.dim());
    m.n_nodes_full = grid.node_count();
    m.node_master.resize(m.n_nodes_full);
    m.node_reduced.assign(m.n_nodes_full, -1);

    const auto& n = grid.resolution();
    for (long i = 0; i < m.n_nodes_full; ++i) {
        auto c = grid.node_coords(i);
        for (int a = 0; a < grid.dim(); ++a)
            if (c[a] == n[a]) c[a] = 0; // one hop per axis resolves edges/corners too
        m.node_master[i] = static_cast<int>(grid.node_index(c[0], c[1], c[2]));
    }

    long next = 0;
    for (long i = 0; i < m.n_nodes_full; ++i)
        if (m.node_master[i] == i) m.node_reduced[i] = static_cast<int>(next++);
    for (long i = 0; i < m.n_nodes_full; ++i)
        m.node_reduced[i] = m.node_reduced[m.node_master[i]];
    m.n_nodes_reduced = next;
    return m;
}

} // namespace pdfem
