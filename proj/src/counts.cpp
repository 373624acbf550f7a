#include "dpcube/counts.hpp"

namespace dpcube {

CountTree CountTree::zeros(int depth, CountKind kind) {
    CountTree tree;
    tree.depth = depth;
    tree.kind = kind;
    tree.levels.resize(static_cast<std::size_t>(depth) + 1);
    for (int j = 0; j <= depth; ++j) {
        tree.levels[j].assign(std::size_t{1} << j, 0);
    }
    return tree;
}

bool CountTree::is_consistent() const {
    for (int j = 0; j < depth; ++j) {
        for (std::size_t i = 0; i < levels[j].size(); ++i) {
            if (levels[j][i] != levels[j + 1][2 * i] + levels[j + 1][2 * i + 1]) return false;
        }
    }
    return true;
}

CountTree true_counts(const Dataset& data, const BinaryPartition& partition) {
    CountTree tree = CountTree::zeros(partition.depth(), CountKind::True);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const CellIndex leaf = partition.locate(data.point(i));
        ++tree.levels[partition.depth()][leaf.bits];
    }
    for (int j = partition.depth(); j > 0; --j) {
        const auto& child = tree.levels[j];
        auto& parent = tree.levels[j - 1];
        for (std::size_t i = 0; i < parent.size(); ++i) {
            parent[i] = child[2 * i] + child[2 * i + 1];
        }
    }
    return tree;
}

}  // namespace dpcube
