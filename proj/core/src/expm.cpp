// Matrix exponential by scaling and squaring with a degree-13 Pade
// approximant (Higham 2005 coefficients).
#include "qef/numerics/expm.hpp"

#include <cmath>

#include <Eigen/LU>

#include "qef/errors.hpp"

namespace qef::numerics {

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    using Mat = Eigen::MatrixXcd;
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw qef::config_error("expm: matrix must be square");
    if (!a.allFinite()) throw qef::config_error("expm: non-finite entries");
    if (n == 0) return a;

    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const double theta13 = 5.371920351148152;

    double nrm = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Mat x = a / std::pow(2.0, s);

    Mat x2 = x * x;
    Mat x4 = x2 * x2;
    Mat x6 = x4 * x2;
    Mat id = Mat::Identity(n, n);

    Mat u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) +
                 b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
    Mat v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) +
            b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

    Mat r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

} // namespace qef::numerics
