"""Pure-Python trajectory loops (fallback for the compiled ``_ckernels``).

Arithmetic is written in the same order as the compiled version and as the
scalar step functions in :mod:`academic_pipeline.core`, so all three give
bit-identical doubles.
"""
import numpy as np


def vacancy_limited(G, P0, F0, g_G, p_GP, p_GF, a_P, a_F, p_PF_max, K_F, alpha_F):
    G = np.ascontiguousarray(G, dtype=np.float64).tolist()
    n = len(G)
    P = [0.0] * n
    F = [0.0] * n
    m = max(n - 1, 0)
    V = [0.0] * m
    c_dir = [0.0] * m
    c_post = [0.0] * m
    H = [0.0] * m
    H_post = [0.0] * m
    ppf_out = [0.0] * m
    p, f = float(P0), float(F0)
    if n:
        P[0] = p
        F[0] = f
    for t in range(m):
        g = G[t]
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
        p, f = p_next, f_next
        P[t + 1] = p
        F[t + 1] = f
    return tuple(np.array(a, dtype=np.float64) for a in (P, F, V, c_dir, c_post, H, H_post, ppf_out))


def unconstrained(B, U0, G0, P0, F0, g_U, a_U, g_G, a_G, p_GP, p_GF, a_P, a_F,
                  p_UG_max, K_G, p_PF_max, K_F, alpha_F):
    B = np.ascontiguousarray(B, dtype=np.float64).tolist()
    m = len(B)
    n = m + 1
    U = [0.0] * n
    G = [0.0] * n
    P = [0.0] * n
    F = [0.0] * n
    pug_out = [0.0] * m
    ppf_out = [0.0] * m
    u, g, p, f = float(U0), float(G0), float(P0), float(F0)
    U[0], G[0], P[0], F[0] = u, g, p, f
    for t in range(m):
        x = 1.0 - g / K_G
        if x < 0.0:
            x = 0.0
        pug = p_UG_max * x
        ppf = p_PF_max / (1.0 + alpha_F * f / K_F)
        cd = p_GF * g_G * g
        cp = ppf * p
        u_next = (1.0 - g_U - a_U) * u + B[t]
        g_next = (1.0 - g_G - a_G) * g + pug * g_U * u
        p_next = (1.0 - ppf - a_P) * p + p_GP * g_G * g
        f_next = (1.0 - a_F) * f + cd + cp
        pug_out[t] = pug
        ppf_out[t] = ppf
        u, g, p, f = u_next, g_next, p_next, f_next
        U[t + 1], G[t + 1], P[t + 1], F[t + 1] = u, g, p, f
    return tuple(np.array(a, dtype=np.float64) for a in (U, G, P, F, pug_out, ppf_out))
