#pragma once

// 64-point Gauss-Hermite rule (physicists weight exp(-y^2)); frozen from an
// independent high-precision computation. For X ~ N(0,1):
//   E[g(X)] = (1/sqrt(pi)) * sum_i w_i g(sqrt(2) y_i)

namespace gh64 {

inline constexpr double kGhNodes[64] = {
    -1.05261231679605469e+01, -9.89528758682953935e+00, -9.37315954964672216e+00, -8.90724909996476910e+00,
    -8.47752908337986355e+00, -8.07368728501022481e+00, -7.68954016404049678e+00, -7.32101303278094928e+00,
    -6.96524112055110756e+00, -6.62011226263602737e+00, -6.28401122877482798e+00, -5.95566632679948604e+00,
    -5.63405216434997236e+00, -5.31832522463327084e+00, -5.00777960219876839e+00, -4.70181564740749991e+00,
    -4.39991716822813750e+00, -4.10163447456665686e+00, -3.80657151394536042e+00, -3.51437593574090634e+00,
    -3.22473129199203568e+00, -2.93735082300462169e+00, -2.65197243543063488e+00, -2.36835458863240156e+00,
    -2.08627287988176180e+00, -1.80551717146554491e+00, -1.52588914020986355e+00, -1.24720015694311792e+00,
    -9.69269423071178027e-01, -6.91922305810044547e-01, -4.14988824121078681e-01, -1.38302244987009715e-01,
    1.38302244987009715e-01, 4.14988824121078681e-01, 6.91922305810044547e-01, 9.69269423071178027e-01,
    1.24720015694311792e+00, 1.52588914020986355e+00, 1.80551717146554491e+00, 2.08627287988176180e+00,
    2.36835458863240156e+00, 2.65197243543063488e+00, 2.93735082300462169e+00, 3.22473129199203568e+00,
    3.51437593574090634e+00, 3.80657151394536042e+00, 4.10163447456665686e+00, 4.39991716822813750e+00,
    4.70181564740749991e+00, 5.00777960219876839e+00, 5.31832522463327084e+00, 5.63405216434997236e+00,
    5.95566632679948604e+00, 6.28401122877482798e+00, 6.62011226263602737e+00, 6.96524112055110756e+00,
    7.32101303278094928e+00, 7.68954016404049678e+00, 8.07368728501022481e+00, 8.47752908337986355e+00,
    8.90724909996476910e+00, 9.37315954964672216e+00, 9.89528758682953935e+00, 1.05261231679605469e+01,
};
inline constexpr double kGhWeights[64] = {
    5.53570653585670235e-49, 1.67974799010812651e-43, 3.42113801125560060e-39, 1.55739062462980566e-35,
    2.54966089911293405e-32, 1.92910359546499477e-29, 7.86179778892592019e-27, 1.91170688330063649e-24,
    2.98286278427984379e-22, 3.15225456650376834e-20, 2.35188471067583268e-18, 1.28009339132243320e-16,
    5.21862372659081109e-15, 1.62834073070971825e-13, 3.95917776694771059e-12, 7.61521725014539772e-11,
    1.17361674232155589e-09, 1.46512531647610567e-08, 1.49553293672724677e-07, 1.25834025103118171e-06,
    8.78849923085035900e-06, 5.12592913578627409e-05, 2.50983698513062583e-04, 1.03632909950757460e-03,
    3.62258697853445845e-03, 1.07560405098791299e-02, 2.72031289536889091e-02, 5.87399819640994428e-02,
    1.08498349306186723e-01, 1.71685842349083656e-01, 2.32994786062678177e-01, 2.71377424941303902e-01,
    2.71377424941303902e-01, 2.32994786062678177e-01, 1.71685842349083656e-01, 1.08498349306186723e-01,
    5.87399819640994428e-02, 2.72031289536889091e-02, 1.07560405098791299e-02, 3.62258697853445845e-03,
    1.03632909950757460e-03, 2.50983698513062583e-04, 5.12592913578627409e-05, 8.78849923085035900e-06,
    1.25834025103118171e-06, 1.49553293672724677e-07, 1.46512531647610567e-08, 1.17361674232155589e-09,
    7.61521725014539772e-11, 3.95917776694771059e-12, 1.62834073070971825e-13, 5.21862372659081109e-15,
    1.28009339132243320e-16, 2.35188471067583268e-18, 3.15225456650376834e-20, 2.98286278427984379e-22,
    1.91170688330063649e-24, 7.86179778892592019e-27, 1.92910359546499477e-29, 2.54966089911293405e-32,
    1.55739062462980566e-35, 3.42113801125560060e-39, 1.67974799010812651e-43, 5.53570653585670235e-49,
};

}  // namespace gh64
