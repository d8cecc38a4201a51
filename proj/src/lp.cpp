#include "fewlab/lp.hpp"

namespace fewlab::lp {

template Solution<double> maximize<double>(const Matrix<double>&,
                                           const Vector<double>&,
                                           const Vector<double>&);
template Solution<Rational> maximize<Rational>(const Matrix<Rational>&,
                                               const Vector<Rational>&,
                                               const Vector<Rational>&);

}  // namespace fewlab::lp
