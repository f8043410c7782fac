#include "agcm/model.hpp"

#include <algorithm>
#include <numeric>

namespace agcm {

ProfileMatrix build_polynomial_profile(const Vector& timepoints, int degree) {
    if (degree < 0) throw ValidationError("polynomial degree must be nonnegative");
    const Index p = timepoints.size();
    if (p == 0) throw ValidationError("at least one timepoint is required");
    for (Index a = 0; a < p; ++a)
        for (Index b = a + 1; b < p; ++b)
            if (timepoints(a) == timepoints(b)) throw DegenerateTimepoints(timepoints(a));

    Matrix Z(p, degree + 1);
    Z.col(0).setOnes();
    for (int j = 1; j <= degree; ++j) Z.col(j) = Z.col(j - 1).cwiseProduct(timepoints);
    return ProfileMatrix{timepoints, degree, std::move(Z)};
}

std::vector<Matrix> build_group_indicator(const std::vector<int>& group_sizes) {
    if (group_sizes.empty()) throw EmptyDesign();
    Index n = 0;
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
        if (group_sizes[g] < 1) throw EmptyGroup("group " + std::to_string(g + 1));
        n += group_sizes[g];
    }
    std::vector<Matrix> columns;
    columns.reserve(group_sizes.size());
    Index offset = 0;
    for (int size : group_sizes) {
        Matrix X = Matrix::Zero(n, 1);
        X.col(0).segment(offset, size).setOnes();
        offset += size;
        columns.push_back(std::move(X));
    }
    return columns;
}

Index ModelSpec::n_params() const {
    return std::accumulate(blocks.begin(), blocks.end(), Index{0},
                           [](Index acc, const DesignBlock& b) { return acc + b.X.cols() * b.Z.cols(); });
}

namespace {

std::string block_name(const DesignBlock& b, std::size_t index) {
    return b.label.empty() ? "block " + std::to_string(index + 1) : b.label;
}

}  // namespace

ModelSpec validate(std::vector<DesignBlock> blocks, double tol) {
    if (blocks.empty()) throw EmptyDesign();

    const Index n = blocks.front().X.rows();
    const Index p = blocks.front().Z.rows();
    if (n == 0 || p == 0) throw EmptyDesign();

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const DesignBlock& b = blocks[i];
        if (b.X.rows() != n)
            throw ValidationError(block_name(b, i) + " has " + std::to_string(b.X.rows()) +
                                  " design rows, expected " + std::to_string(n));
        if (b.Z.rows() != p || b.Z.timepoints.size() != p ||
            (b.Z.timepoints.array() != blocks.front().Z.timepoints.array()).any())
            throw MixedTimepoints();
        if (b.X.cols() == 0 || b.Z.cols() == 0)
            throw ValidationError(block_name(b, i) + " has an empty design or profile");
        if (numerical_rank(b.X) < b.X.cols())
            throw RankDeficient(block_name(b, i) + ": X is " + std::to_string(b.X.rows()) + "x" +
                                std::to_string(b.X.cols()) + " with rank " +
                                std::to_string(numerical_rank(b.X)));
        if (numerical_rank(b.Z.matrix) < b.Z.cols())
            throw RankDeficient(block_name(b, i) + ": Z is " + std::to_string(b.Z.rows()) + "x" +
                                std::to_string(b.Z.cols()) + " with rank " +
                                std::to_string(numerical_rank(b.Z.matrix)));
    }

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            const double cross = (blocks[i].X.transpose() * blocks[j].X).cwiseAbs().maxCoeff();
            const double scale = blocks[i].X.cwiseAbs().maxCoeff() *
                                 blocks[j].X.cwiseAbs().maxCoeff() * static_cast<double>(n);
            if (cross > tol * std::max(1.0, scale))
                throw NotOrthogonal(static_cast<int>(i), static_cast<int>(j), cross);
        }
    }

    Index rank_sum = 0;
    for (const DesignBlock& b : blocks) rank_sum += b.X.cols();
    const Index r = n - rank_sum;
    if (r < p) throw InsufficientResidualDof(r, p);

    ModelSpec spec;
    spec.blocks = std::move(blocks);
    spec.n = n;
    spec.p = p;
    spec.residual_dof = r;
    return spec;
}

}  // namespace agcm
