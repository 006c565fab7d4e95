#pragma once

// Generated by tools/gen_closed_forms.py. Do not edit by hand.

#include "kdvb/detail/term_sum.hpp"

namespace kdvb::closed_form {

template <class Derivs>
inline TermSum A(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.t);
  a.add(1.0 * s * d.x[3]);
  a.add(1.0 * s * s * s * d.x[1] * d.x[1] * d.x[1]);
  a.add(-1.0 * s * d.x[2]);
  a.add(-1.0 * s * s * d.x[1] * d.x[1]);
  a.add(3.0 * s * s * d.x[1] * d.x[2]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum B(const Derivs& d, double s) {
  TermSum a;
  a.add(-2.0 * s * d.x[1]);
  a.add(3.0 * s * d.x[2]);
  a.add(3.0 * s * s * d.x[1] * d.x[1]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum C(const Derivs& d, double s) {
  TermSum a;
  a.add(-1.0 * 1.0);
  a.add(3.0 * s * d.x[1]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum A_t(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.tt);
  a.add(1.0 * s * d.xt[3]);
  a.add(-1.0 * s * d.xt[2]);
  a.add(-2.0 * s * s * d.x[1] * d.xt[1]);
  a.add(3.0 * s * s * d.x[1] * d.xt[2]);
  a.add(3.0 * s * s * d.x[2] * d.xt[1]);
  a.add(3.0 * s * s * s * d.x[1] * d.x[1] * d.xt[1]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum A_xxx(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.x[6]);
  a.add(1.0 * s * d.xt[3]);
  a.add(-1.0 * s * d.x[5]);
  a.add(6.0 * s * s * s * d.x[2] * d.x[2] * d.x[2]);
  a.add(9.0 * s * s * d.x[3] * d.x[3]);
  a.add(-6.0 * s * s * d.x[2] * d.x[3]);
  a.add(-2.0 * s * s * d.x[1] * d.x[4]);
  a.add(3.0 * s * s * d.x[1] * d.x[5]);
  a.add(3.0 * s * s * s * d.x[1] * d.x[1] * d.x[4]);
  a.add(12.0 * s * s * d.x[2] * d.x[4]);
  a.add(18.0 * s * s * s * d.x[1] * d.x[2] * d.x[3]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum AB_x(const Derivs& d, double s) {
  TermSum a;
  a.add(2.0 * s * s * d.x[2] * d.x[2]);
  a.add(3.0 * s * s * d.x[3] * d.x[3]);
  a.add(9.0 * s * s * s * d.x[2] * d.x[2] * d.x[2]);
  a.add(-24.0 * s * s * s * d.x[2] * d.x[2] * d.x[1]);
  a.add(-20.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[2]);
  a.add(-12.0 * s * s * s * d.x[1] * d.x[1] * d.x[3]);
  a.add(-8.0 * s * s * d.x[2] * d.x[3]);
  a.add(-2.0 * s * s * d.t * d.x[2]);
  a.add(-2.0 * s * s * d.x[1] * d.x[4]);
  a.add(-2.0 * s * s * d.x[1] * d.xt[1]);
  a.add(2.0 * s * s * d.x[1] * d.x[3]);
  a.add(3.0 * s * s * d.t * d.x[3]);
  a.add(3.0 * s * s * d.x[2] * d.x[4]);
  a.add(3.0 * s * s * d.x[2] * d.xt[1]);
  a.add(3.0 * s * s * s * d.x[1] * d.x[1] * d.x[4]);
  a.add(3.0 * s * s * s * d.x[1] * d.x[1] * d.xt[1]);
  a.add(6.0 * s * s * s * d.x[1] * d.x[1] * d.x[2]);
  a.add(12.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[3]);
  a.add(15.0 * s * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[1] * d.x[2]);
  a.add(36.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[2] * d.x[2]);
  a.add(6.0 * s * s * s * d.t * d.x[1] * d.x[2]);
  a.add(24.0 * s * s * s * d.x[1] * d.x[2] * d.x[3]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum ACx_x(const Derivs& d, double s) {
  TermSum a;
  a.add(3.0 * s * s * d.x[3] * d.x[3]);
  a.add(9.0 * s * s * s * d.x[2] * d.x[2] * d.x[2]);
  a.add(-6.0 * s * s * d.x[2] * d.x[3]);
  a.add(-6.0 * s * s * s * d.x[2] * d.x[2] * d.x[1]);
  a.add(-3.0 * s * s * s * d.x[1] * d.x[1] * d.x[3]);
  a.add(3.0 * s * s * d.t * d.x[3]);
  a.add(3.0 * s * s * d.x[2] * d.x[4]);
  a.add(3.0 * s * s * d.x[2] * d.xt[1]);
  a.add(3.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[3]);
  a.add(9.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[2] * d.x[2]);
  a.add(18.0 * s * s * s * d.x[1] * d.x[2] * d.x[3]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum D(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.x[5]);
  a.add(1.0 * s * d.xt[2]);
  a.add(-1.0 * s * d.tt);
  a.add(-1.0 * s * d.x[6]);
  a.add(-24.0 * s * s * s * d.x[2] * d.x[2] * d.x[2]);
  a.add(-15.0 * s * s * d.x[3] * d.x[3]);
  a.add(-2.0 * s * d.xt[3]);
  a.add(-2.0 * s * s * d.x[2] * d.x[2]);
  a.add(-45.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[2] * d.x[2]);
  a.add(-18.0 * s * s * d.x[2] * d.x[4]);
  a.add(-15.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[3]);
  a.add(-15.0 * s * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[1] * d.x[2]);
  a.add(-9.0 * s * s * d.x[2] * d.xt[1]);
  a.add(-6.0 * s * s * d.t * d.x[3]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.x[2]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.x[4]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.xt[1]);
  a.add(-3.0 * s * s * d.x[1] * d.x[5]);
  a.add(-3.0 * s * s * d.x[1] * d.xt[2]);
  a.add(-2.0 * s * s * d.x[1] * d.x[3]);
  a.add(2.0 * s * s * d.t * d.x[2]);
  a.add(4.0 * s * s * d.x[1] * d.x[4]);
  a.add(4.0 * s * s * d.x[1] * d.xt[1]);
  a.add(15.0 * s * s * s * d.x[1] * d.x[1] * d.x[3]);
  a.add(20.0 * s * s * d.x[2] * d.x[3]);
  a.add(20.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[2]);
  a.add(30.0 * s * s * s * d.x[2] * d.x[2] * d.x[1]);
  a.add(-60.0 * s * s * s * d.x[1] * d.x[2] * d.x[3]);
  a.add(-6.0 * s * s * s * d.t * d.x[1] * d.x[2]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum E(const Derivs& d, double s) {
  TermSum a;
  a.add(-2.0 * s * d.x[2]);
  a.add(3.0 * s * d.x[3]);
  a.add(6.0 * s * d.x[4]);
  a.add(6.0 * s * d.xt[1]);
  a.add(9.0 * s * s * d.x[2] * d.x[2]);
  a.add(-9.0 * s * s * d.x[1] * d.x[3]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum F(const Derivs& d, double s) {
  TermSum a;
  a.add(-9.0 * s * d.x[2]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum G(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.t);
  a.add(-9.0 * s * s * d.x[2] * d.x[2]);
  a.add(-8.0 * s * s * s * d.x[1] * d.x[1] * d.x[1]);
  a.add(-2.0 * s * d.x[1]);
  a.add(4.0 * s * d.x[3]);
  a.add(5.0 * s * d.x[2]);
  a.add(8.0 * s * s * d.x[1] * d.x[1]);
  a.add(-15.0 * s * s * d.x[1] * d.x[2]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum H(const Derivs& d, double s) {
  TermSum a;
  a.add(-3.0 * s * d.x[1]);
  (void)d;
  (void)s;
  return a;
}

template <class Derivs>
inline TermSum D1(const Derivs& d, double s) {
  TermSum a;
  a.add(1.0 * s * d.x[5]);
  a.add(1.0 * s * d.xt[2]);
  a.add(-1.0 * s * d.tt);
  a.add(-1.0 * s * d.x[6]);
  a.add(-24.0 * s * s * s * d.x[2] * d.x[2] * d.x[2]);
  a.add(-15.0 * s * s * d.x[3] * d.x[3]);
  a.add(-2.0 * s * d.xt[3]);
  a.add(-2.0 * s * s * d.x[2] * d.x[2]);
  a.add(-45.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[2] * d.x[2]);
  a.add(-18.0 * s * s * d.x[2] * d.x[4]);
  a.add(-15.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[3]);
  a.add(-9.0 * s * s * d.x[2] * d.xt[1]);
  a.add(-6.0 * s * s * d.t * d.x[3]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.x[2]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.x[4]);
  a.add(-6.0 * s * s * s * d.x[1] * d.x[1] * d.xt[1]);
  a.add(-3.0 * s * s * d.x[1] * d.x[5]);
  a.add(-3.0 * s * s * d.x[1] * d.xt[2]);
  a.add(-2.0 * s * s * d.x[1] * d.x[3]);
  a.add(2.0 * s * s * d.t * d.x[2]);
  a.add(4.0 * s * s * d.x[1] * d.x[4]);
  a.add(4.0 * s * s * d.x[1] * d.xt[1]);
  a.add(15.0 * s * s * s * d.x[1] * d.x[1] * d.x[3]);
  a.add(20.0 * s * s * d.x[2] * d.x[3]);
  a.add(20.0 * s * s * s * s * d.x[1] * d.x[1] * d.x[1] * d.x[2]);
  a.add(30.0 * s * s * s * d.x[2] * d.x[2] * d.x[1]);
  a.add(-60.0 * s * s * s * d.x[1] * d.x[2] * d.x[3]);
  a.add(-6.0 * s * s * s * d.t * d.x[1] * d.x[2]);
  (void)d;
  (void)s;
  return a;
}

}  // namespace kdvb::closed_form
