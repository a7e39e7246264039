# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory loops. Same signatures and arithmetic order as ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def vacancy_limited(G, double P0, double F0, double g_G, double p_GP, double p_GF,
                    double a_P, double a_F, double p_PF_max, double K_F, double alpha_F):
    cdef const double[::1] g_in = np.ascontiguousarray(G, dtype=np.float64)
    cdef Py_ssize_t n = g_in.shape[0]
    cdef Py_ssize_t m = n - 1 if n > 0 else 0
    P_arr = np.zeros(n, dtype=np.float64)
    F_arr = np.zeros(n, dtype=np.float64)
    V_arr = np.zeros(m, dtype=np.float64)
    cd_arr = np.zeros(m, dtype=np.float64)
    cp_arr = np.zeros(m, dtype=np.float64)
    H_arr = np.zeros(m, dtype=np.float64)
    Hp_arr = np.zeros(m, dtype=np.float64)
    ppf_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] P = P_arr
    cdef double[::1] F = F_arr
    cdef double[::1] V = V_arr
    cdef double[::1] c_dir = cd_arr
    cdef double[::1] c_post = cp_arr
    cdef double[::1] H = H_arr
    cdef double[::1] H_post = Hp_arr
    cdef double[::1] ppf_out = ppf_arr
    cdef double p = P0, f = F0, g, ppf, v, cd, cp, supply, h, hp, f_next, p_next
    cdef Py_ssize_t t
    if n == 0:
        return P_arr, F_arr, V_arr, cd_arr, cp_arr, H_arr, Hp_arr, ppf_arr
    P[0] = p
    F[0] = f
    with nogil:
        for t in range(m):
            g = g_in[t]
            ppf = p_PF_max / (1.0 + alpha_F * f / K_F)
            v = a_F * f
            cd = p_GF * g_G * g
            cp = ppf * p
            supply = cd + cp
            if supply <= 0.0:
                h = 0.0
                hp = 0.0
            else:
                h = v if v < supply else supply
                hp = h * cp / supply
            f_next = (1.0 - a_F) * f + h
            p_next = p - hp - a_P * p + p_GP * g_G * g
            V[t] = v
            c_dir[t] = cd
            c_post[t] = cp
            H[t] = h
            H_post[t] = hp
            ppf_out[t] = ppf
            p = p_next
            f = f_next
            P[t + 1] = p
            F[t + 1] = f
    return P_arr, F_arr, V_arr, cd_arr, cp_arr, H_arr, Hp_arr, ppf_arr


def unconstrained(B, double U0, double G0, double P0, double F0, double g_U, double a_U,
                  double g_G, double a_G, double p_GP, double p_GF, double a_P, double a_F,
                  double p_UG_max, double K_G, double p_PF_max, double K_F, double alpha_F):
    cdef const double[::1] b_in = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t m = b_in.shape[0]
    cdef Py_ssize_t n = m + 1
    U_arr = np.zeros(n, dtype=np.float64)
    G_arr = np.zeros(n, dtype=np.float64)
    P_arr = np.zeros(n, dtype=np.float64)
    F_arr = np.zeros(n, dtype=np.float64)
    pug_arr = np.zeros(m, dtype=np.float64)
    ppf_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] U = U_arr
    cdef double[::1] G = G_arr
    cdef double[::1] P = P_arr
    cdef double[::1] F = F_arr
    cdef double[::1] pug_out = pug_arr
    cdef double[::1] ppf_out = ppf_arr
    cdef double u = U0, g = G0, p = P0, f = F0
    cdef double x, pug, ppf, cd, cp, u_next, g_next, p_next, f_next
    cdef Py_ssize_t t
    U[0] = u
    G[0] = g
    P[0] = p
    F[0] = f
    with nogil:
        for t in range(m):
            x = 1.0 - g / K_G
            if x < 0.0:
                x = 0.0
            pug = p_UG_max * x
            ppf = p_PF_max / (1.0 + alpha_F * f / K_F)
            cd = p_GF * g_G * g
            cp = ppf * p
            u_next = (1.0 - g_U - a_U) * u + b_in[t]
            g_next = (1.0 - g_G - a_G) * g + pug * g_U * u
            p_next = (1.0 - ppf - a_P) * p + p_GP * g_G * g
            f_next = (1.0 - a_F) * f + cd + cp
            pug_out[t] = pug
            ppf_out[t] = ppf
            u = u_next
            g = g_next
            p = p_next
            f = f_next
            U[t + 1] = u
            G[t + 1] = g
            P[t + 1] = p
            F[t + 1] = f
    return U_arr, G_arr, P_arr, F_arr, pug_arr, ppf_arr
