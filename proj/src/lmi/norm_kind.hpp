#pragma once

namespace dhstab::lmi {

// Norm used by residual objectives and feedback-size reporting. Frobenius
// fits a second-order cone; spectral fits a symmetric PSD block.
enum class NormKind { frobenius, spectral };

}  // namespace dhstab::lmi
