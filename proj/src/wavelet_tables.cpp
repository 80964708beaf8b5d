// Generated by scripts/make_wavelet_tables.py -- do not edit by hand.
// Orthogonal scaling (low-pass analysis) filters, sum = sqrt(2).

#include "src/wavelet_tables.hpp"

namespace rird::tables {

const double kHaar[] = {
    0.7071067811865475244, 0.7071067811865475244,
};

const double kDb2[] = {
    -0.1294095225512603812, 0.2241438680420133810, 0.8365163037378079056, 0.4829629131445341434,
};

const double kDb3[] = {
    0.03522629188570953660, -0.08544127388202666169, -0.1350110200102545887, 0.4598775021184915701,
    0.8068915093110925765, 0.3326705529500826160,
};

const double kDb4[] = {
    -0.01059740178506903210, 0.03288301166688519974, 0.03084138183556076363, -0.1870348117190930841,
    -0.02798376941685985421, 0.6308807679298589079, 0.7148465705529156471, 0.2303778133088965009,
};

const double kDb5[] = {
    0.003335725285473771278, -0.01258075199908199947, -0.006241490212798274274, 0.07757149384004571352,
    -0.03224486958463837465, -0.2422948870663820319, 0.1384281459013207315, 0.7243085284377729277,
    0.6038292697971896705, 0.1601023979741929145,
};

const double kDb6[] = {
    -0.001077301085308479565, 0.004777257510945510640, 0.0005538422011614961393, -0.03158203931748602957,
    0.02752286553030572863, 0.09750160558732304910, -0.1297668675672619356, -0.2262646939654398201,
    0.3152503517091976291, 0.7511339080210953507, 0.4946238903984530857, 0.1115407433501094636,
};

const double kDb7[] = {
    0.0003537137999745202484, -0.001801640704047490915, 0.0004295779729213665211, 0.01255099855609984061,
    -0.01657454163066688065, -0.03802993693501441358, 0.08061260915108307191, 0.07130921926683026475,
    -0.2240361849938749826, -0.1439060039285649754, 0.4697822874051931225, 0.7291320908462351199,
    0.3965393194819173065, 0.07785205408500917902,
};

const double kDb8[] = {
    -0.0001174767841247695337, 0.0006754494064505693664, -0.0003917403733769470463, -0.004870352993451574310,
    0.008746094047405776716, 0.01398102791739828165, -0.04408825393079475151, -0.01736930100180754617,
    0.1287474266204784589, 0.0004724845739132827704, -0.2840155429615469265, -0.01582910525634930567,
    0.5853546836542067128, 0.6756307362972898068, 0.3128715909142999707, 0.05441584224310400996,
};

const double kDb9[] = {
    0.00003934732031627159948, -0.0002519631889427101370, 0.0002303857635231959672, 0.001847646883056226477,
    -0.004281503682463429834, -0.004723204757751397278, 0.02236166212367909721, 0.0002509471148314519576,
    -0.06763282906132997368, 0.03072568147933337921, 0.1485407493381063801, -0.09684078322297646051,
    -0.2932737832791749088, 0.1331973858250075762, 0.6572880780513005381, 0.6048231236901111119,
    0.2438346746125903537, 0.03807794736387834659,
};

const double kDb10[] = {
    -0.00001326420289452124481, 0.00009358867032006959133, -0.0001164668551292854510, -0.0006858566949597116266,
    0.001992405295185056117, 0.001395351747052901166, -0.01073317548333057504, 0.003606553566956169655,
    0.03321267405934100174, -0.02945753682187581286, -0.07139414716639708715, 0.09305736460357235116,
    0.1273693403357932601, -0.1959462743773770435, -0.2498464243273153794, 0.2811723436605774607,
    0.6884590394536035657, 0.5272011889317255865, 0.1881768000776914890, 0.02667005790055555359,
};

const double kDmey[] = {
    1.844405659986645112e-8, 3.339511372564305338e-7, 2.200050202872735211e-6, 3.809750511453511689e-6,
    8.721639778981327208e-6, 6.721528412246947459e-6, -9.228670830460042763e-6, -0.00001495545250170814979,
    0.00004681501230442396415, 0.00005692405372480789964, -0.00002357558097085526300, -0.00004110817421803923287,
    -0.00006336267732760675624, -0.0002370400086681753835, 0.0002698185074436021771, 0.0009666044150491027564,
    -0.0009379161767156339981, -0.002697599429330414713, 0.002497815218574967605, 0.005900878240419153362,
    -0.006435377590675476350, -0.01092166215682681234, 0.01491868869582607671, 0.01747744694516432593,
    -0.03223917529391336079, -0.02432612667033411460, 0.06371957961057311826, 0.03059148506867999037,
    -0.1326601915068592319, -0.03507030467920001227, 0.4441139376812196504, 0.7437300969455911126,
    0.4441178612470026432, -0.03507046959409551579, -0.1326854395370941631, 0.03058954791441571147,
    0.06367808526126692015, -0.02433107856092156865, -0.03201688983323315585, 0.01747464295202807993,
    0.01535685923736408373, -0.01091820344427025906, -0.006387917973985112949, 0.005899917528175754183,
    0.002245422582205769662, -0.002698541995642055828, -0.0005537065176182335950, 0.0009600015971968104897,
    0.0002034333730803183091, -0.0002308094669265953755, -0.00009591162480665840762, -0.00003638668197704766959,
    0.0001952314423728097989, 0.00005418181645868306640, -0.0002453097728947894888, 0.00009412048231174043240,
    0.00002155289966411706205, -0.00006256849335924451812, 0.00005811291480078483536, -0.00004271101470631435049,
    6.630125734493938603e-6, -3.661797508419740500e-7,
};

} // namespace rird::tables
