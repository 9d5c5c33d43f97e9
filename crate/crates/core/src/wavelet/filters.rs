//! Daubechies low-pass filters, minimum-phase, `Σ h = √2`.
//!
//! Computed offline by spectral factorisation of the Daubechies polynomial
//! `P(y) = Σ_{k<N} C(N-1+k, k) y^k` in 60-digit arithmetic, keeping the roots inside
//! the unit circle, and rounded to 21 significant digits. They agree with the
//! published tables to the 15 digits those carry.

#![allow(clippy::excessive_precision)]

pub(crate) const DB2: [f64; 4] = [
    4.82962913144534143375e-1,
    8.36516303737807905575e-1,
    2.24143868042013381026e-1,
    -1.29409522551260381174e-1,
];

pub(crate) const DB3: [f64; 6] = [
    3.32670552950082615999e-1,
    8.06891509311092576494e-1,
    4.59877502118491570095e-1,
    -1.35011020010254588696e-1,
    -8.54412738820266616928e-2,
    3.52262918857095366027e-2,
];

pub(crate) const DB4: [f64; 8] = [
    2.30377813308896500863e-1,
    7.1484657055291564709e-1,
    6.30880767929858907882e-1,
    -2.79837694168598542114e-2,
    -1.8703481171909308408e-1,
    3.08413818355607636272e-2,
    3.28830116668851997354e-2,
    -1.05974017850690321049e-2,
];

pub(crate) const DB5: [f64; 10] = [
    1.60102397974192914481e-1,
    6.0382926979718967054e-1,
    7.24308528437772927728e-1,
    1.38428145901320731505e-1,
    -2.42294887066382031863e-1,
    -3.22448695846383746485e-2,
    7.75714938400457135231e-2,
    -6.24149021279827427419e-3,
    -1.25807519990819994685e-2,
    3.335725285473771278e-3,
];

pub(crate) const DB6: [f64; 12] = [
    1.11540743350109463621e-1,
    4.94623890398453085677e-1,
    7.51133908021095350679e-1,
    3.15250351709197629086e-1,
    -2.26264693965439820076e-1,
    -1.29766867567261935562e-1,
    9.75016055873230491023e-2,
    2.75228655303057286255e-2,
    -3.15820393174860295651e-2,
    5.53842201161496139252e-4,
    4.77725751094551063964e-3,
    -1.07730108530847956485e-3,
];

pub(crate) const DB7: [f64; 14] = [
    7.785205408500917902e-2,
    3.96539319481917306539e-1,
    7.29132090846235119917e-1,
    4.69782287405193122472e-1,
    -1.43906003928564975405e-1,
    -2.24036184993874982638e-1,
    7.13092192668302647509e-2,
    8.06126091510830719129e-2,
    -3.80299369350144135796e-2,
    -1.65745416306668806541e-2,
    1.2550998556099840613e-2,
    4.29577972921366521132e-4,
    -1.80164070404749091527e-3,
    3.53713799974520248446e-4,
];

pub(crate) const DB8: [f64; 16] = [
    5.4415842243104009955e-2,
    3.12871590914299970659e-1,
    6.75630736297289806808e-1,
    5.85354683654206712771e-1,
    -1.58291052563493056674e-2,
    -2.84015542961546926516e-1,
    4.72484573913282770361e-4,
    1.28747426620478458857e-1,
    -1.73693010018075461696e-2,
    -4.40882539307947515068e-2,
    1.39810279173982816487e-2,
    8.74609404740577671638e-3,
    -4.87035299345157431042e-3,
    -3.91740373376947046298e-4,
    6.7544940645056936637e-4,
    -1.17476784124769533731e-4,
];

pub(crate) const DB9: [f64; 18] = [
    3.80779473638783465887e-2,
    2.43834674612590353732e-1,
    6.04823123690111111903e-1,
    6.57288078051300538078e-1,
    1.33197385825007576191e-1,
    -2.93273783279174908806e-1,
    -9.68407832229764605135e-2,
    1.48540749338106380135e-1,
    3.07256814793333792123e-2,
    -6.76328290613299736756e-2,
    2.50947114831451957587e-4,
    2.23616621236790972054e-2,
    -4.72320475775139727793e-3,
    -4.2815036824634298345e-3,
    1.84764688305622647662e-3,
    2.30385763523195967205e-4,
    -2.51963188942710136975e-4,
    3.93473203162715994807e-5,
];

pub(crate) const DB10: [f64; 20] = [
    2.66700579005555535866e-2,
    1.88176800077691489021e-1,
    5.27201188931725586482e-1,
    6.88459039453603565742e-1,
    2.81172343660577460749e-1,
    -2.49846424327315379416e-1,
    -1.95946274377377043504e-1,
    1.27369340335793260083e-1,
    9.30573646035723511604e-2,
    -7.13941471663970871453e-2,
    -2.94575368218758128583e-2,
    3.32126740593410017398e-2,
    3.60655356695616965542e-3,
    -1.07331754833305750443e-2,
    1.39535174705290116579e-3,
    1.99240529518505611716e-3,
    -6.85856694959711626561e-4,
    -1.16466855129285450951e-4,
    9.35886703200695913341e-5,
    -1.32642028945212448124e-5,
];

