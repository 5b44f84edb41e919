"""Coefficient sets: classical RK4, DOP853 (Hairer-Wanner) and the 5-stage Gauss method."""

from __future__ import annotations

import functools
import math

import numpy as np

from .core import ButcherTableau


@functools.cache
def rk4_tableau() -> ButcherTableau:
    A = [[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]]
    return ButcherTableau(A=A, b=[1 / 6, 2 / 6, 2 / 6, 1 / 6], c=[0, 0.5, 0.5, 1], p0=4, name="rk4")


@functools.cache
def gauss10_tableau() -> ButcherTableau:
    """Implicit 5-stage Gauss-Legendre collocation method of order 10.

    Entries are closed forms in sqrt(70). ``half_wt`` and ``off`` are half the
    outer weight and the outer node's distance from 1/2; ``*_in`` names are the
    inner-node counterparts (opposite sign on sqrt(70)).
    """
    r = math.sqrt(70.0)
    half_wt = (322 - 13 * r) / 3600
    half_wt_in = (322 + 13 * r) / 3600
    off = 0.5 * math.sqrt((35 + 2 * r) / 63)
    off_in = 0.5 * math.sqrt((35 - 2 * r) / 63)
    d3 = off * (452 + 59 * r) / 3240
    d3_in = off_in * (452 - 59 * r) / 3240
    d4 = off * (64 + 11 * r) / 1080
    d4_in = off_in * (64 - 11 * r) / 1080
    d5 = 8 * off * (23 - r) / 405
    d5_in = 8 * off_in * (23 + r) / 405
    d6 = off - 2 * d3 - d5
    d6_in = off_in - 2 * d3_in - d5_in
    d7 = off * (308 - 23 * r) / 960
    d7_in = off_in * (308 + 23 * r) / 960
    q = 32 / 225

    A = [
        [half_wt, half_wt_in - d3 + d4_in, q - d5, half_wt_in - d3 - d4_in, half_wt - d6],
        [half_wt - d3_in + d4, half_wt_in, q - d5_in, half_wt_in - d6_in, half_wt - d3_in - d4],
        [half_wt + d7, half_wt_in + d7_in, q, half_wt_in - d7_in, half_wt - d7],
        [half_wt + d3_in + d4, half_wt_in + d6_in, q + d5_in, half_wt_in, half_wt + d3_in - d4],
        [half_wt + d6, half_wt_in + d3 + d4_in, q + d5, half_wt_in + d3 - d4_in, half_wt],
    ]
    b = [2 * half_wt, 2 * half_wt_in, 64 / 225, 2 * half_wt_in, 2 * half_wt]
    c = [0.5 - off, 0.5 - off_in, 0.5, 0.5 + off_in, 0.5 + off]
    return ButcherTableau(A=A, b=b, c=c, p0=10, name="gauss10")


# DOP853 coefficients, transcribed from the Hairer-Wanner dop853 code.
DOP853_C = np.array([
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
])

DOP853_A = np.zeros((12, 12))
DOP853_A[1, 0] = 5.26001519587677318785587544488e-2
DOP853_A[2, 0] = 1.97250569845378994544595329183e-2
DOP853_A[2, 1] = 5.91751709536136983633785987549e-2
DOP853_A[3, 0] = 2.95875854768068491816892993775e-2
DOP853_A[3, 2] = 8.87627564304205475450678981324e-2
DOP853_A[4, 0] = 2.41365134159266685502369798665e-1
DOP853_A[4, 2] = -8.84549479328286085344864962717e-1
DOP853_A[4, 3] = 9.24834003261792003115737966543e-1
DOP853_A[5, 0] = 3.7037037037037037037037037037e-2
DOP853_A[5, 3] = 1.70828608729473871279604482173e-1
DOP853_A[5, 4] = 1.25467687566822425016691814123e-1
DOP853_A[6, 0] = 3.7109375e-2
DOP853_A[6, 3] = 1.70252211019544039314978060272e-1
DOP853_A[6, 4] = 6.02165389804559606850219397283e-2
DOP853_A[6, 5] = -1.7578125e-2
DOP853_A[7, 0] = 3.70920001185047927108779319836e-2
DOP853_A[7, 3] = 1.70383925712239993810214054705e-1
DOP853_A[7, 4] = 1.07262030446373284651809199168e-1
DOP853_A[7, 5] = -1.53194377486244017527936158236e-2
DOP853_A[7, 6] = 8.27378916381402288758473766002e-3
DOP853_A[8, 0] = 6.24110958716075717114429577812e-1
DOP853_A[8, 3] = -3.36089262944694129406857109825
DOP853_A[8, 4] = -8.68219346841726006818189891453e-1
DOP853_A[8, 5] = 2.75920996994467083049415600797e1
DOP853_A[8, 6] = 2.01540675504778934086186788979e1
DOP853_A[8, 7] = -4.34898841810699588477366255144e1
DOP853_A[9, 0] = 4.77662536438264365890433908527e-1
DOP853_A[9, 3] = -2.48811461997166764192642586468
DOP853_A[9, 4] = -5.90290826836842996371446475743e-1
DOP853_A[9, 5] = 2.12300514481811942347288949897e1
DOP853_A[9, 6] = 1.52792336328824235832596922938e1
DOP853_A[9, 7] = -3.32882109689848629194453265587e1
DOP853_A[9, 8] = -2.03312017085086261358222928593e-2
DOP853_A[10, 0] = -9.3714243008598732571704021658e-1
DOP853_A[10, 3] = 5.18637242884406370830023853209
DOP853_A[10, 4] = 1.09143734899672957818500254654
DOP853_A[10, 5] = -8.14978701074692612513997267357
DOP853_A[10, 6] = -1.85200656599969598641566180701e1
DOP853_A[10, 7] = 2.27394870993505042818970056734e1
DOP853_A[10, 8] = 2.49360555267965238987089396762
DOP853_A[10, 9] = -3.0467644718982195003823669022
DOP853_A[11, 0] = 2.27331014751653820792359768449
DOP853_A[11, 3] = -1.05344954667372501984066689879e1
DOP853_A[11, 4] = -2.00087205822486249909675718444
DOP853_A[11, 5] = -1.79589318631187989172765950534e1
DOP853_A[11, 6] = 2.79488845294199600508499808837e1
DOP853_A[11, 7] = -2.85899827713502369474065508674
DOP853_A[11, 8] = -8.87285693353062954433549289258
DOP853_A[11, 9] = 1.23605671757943030647266201528e1
DOP853_A[11, 10] = 6.43392746015763530355970484046e-1

DOP853_B = np.zeros(12)
DOP853_B[0] = 5.42937341165687622380535766363e-2
DOP853_B[5] = 4.45031289275240888144113950566
DOP853_B[6] = 1.89151789931450038304281599044
DOP853_B[7] = -5.8012039600105847814672114227
DOP853_B[8] = 3.1116436695781989440891606237e-1
DOP853_B[9] = -1.52160949662516078556178806805e-1
DOP853_B[10] = 2.01365400804030348374776537501e-1
DOP853_B[11] = 4.47106157277725905176885569043e-2

# 5th-order error weights: h * sum(E5 * k) is the 8-vs-5 difference
DOP853_E5 = np.zeros(12)
DOP853_E5[0] = 0.1312004499419488073250102996e-1
DOP853_E5[5] = -0.1225156446376204440720569753e+1
DOP853_E5[6] = -0.4957589496572501915214079952
DOP853_E5[7] = 0.1664377182454986536961530415e+1
DOP853_E5[8] = -0.3503288487499736816886487290
DOP853_E5[9] = 0.3341791187130174790297318841
DOP853_E5[10] = 0.8192320648511571246570742613e-1
DOP853_E5[11] = -0.2235530786388629525884427845e-1

# 3rd-order error weights: b minus the bhh weights (stages 1, 9, 12)
DOP853_E3 = DOP853_B.copy()
DOP853_E3[0] -= 0.244094488188976377952755905512
DOP853_E3[8] -= 0.733846688281611857341361741547
DOP853_E3[11] -= 0.220588235294117647058823529412e-1

for _arr in (DOP853_A, DOP853_B, DOP853_C, DOP853_E5, DOP853_E3):
    _arr.setflags(write=False)


@functools.cache
def dop853_tableau() -> ButcherTableau:
    return ButcherTableau(A=DOP853_A, b=DOP853_B, c=DOP853_C, p0=8, name="dop853")
