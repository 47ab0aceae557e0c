//! Precomputed double-support paths for the default robot (mm, deg).

use crate::model::JointVector;

/// Right foot 110 mm behind the left; link 6 swept from vertical to flat, then CoM shifted onto the strip.
pub(crate) const ROLL_NEAR: [JointVector; 56] = [
    [28.6469385, 70.5810993, 0.0, 90.0, 0.0, 51.9324696, 28.8394925],
    [29.4028686, 71.55346, 0.0, 88.2242584, 0.0, 53.0925609, 29.7268521],
    [30.3208361, 72.3021503, 0.0, 86.6510689, 0.0, 54.0481632, 30.6777816],
    [31.3542813, 72.8885241, 0.0, 85.2284636, 0.0, 54.8567021, 31.6720289],
    [32.4723676, 73.35307, 0.0, 83.9222311, 0.0, 55.5559847, 32.6963466],
    [33.6536693, 73.7238209, 0.0, 82.7087918, 0.0, 56.1720449, 33.741673],
    [34.8827258, 74.0209382, 0.0, 81.5712973, 0.0, 56.7234556, 34.8015832],
    [36.1480374, 74.259372, 0.0, 80.4973588, 0.0, 57.223846, 35.8713858],
    [37.4408345, 74.4504909, 0.0, 79.4776545, 0.0, 57.6834485, 36.9475715],
    [38.7542952, 74.603118, 0.0, 78.5050394, 0.0, 58.1100923, 38.0274551],
    [40.0830193, 74.7242217, 0.0, 77.5739528, 0.0, 58.5098639, 39.1089423],
    [41.4226686, 74.8193877, 0.0, 76.6800153, 0.0, 58.8875544, 40.190374],
    [42.7697158, 74.8931489, 0.0, 75.8197431, 0.0, 59.2469801, 41.2704121],
    [44.1212593, 74.9492265, 0.0, 74.9903423, 0.0, 59.5912102, 42.3479617],
    [45.4748893, 74.9907032, 0.0, 74.1895608, 0.0, 59.9227309, 43.4221158],
    [46.8285853, 75.020158, 0.0, 73.4155713, 0.0, 60.2435753, 44.4921102],
    [48.1806378, 75.0397661, 0.0, 72.6668876, 0.0, 60.5554126, 45.557296],
    [49.5295871, 75.0513788, 0.0, 71.9422953, 0.0, 60.8596239, 46.6171149],
    [50.8741752, 75.0565853, 0.0, 71.2408004, 0.0, 61.1573555, 47.6710836],
    [52.2133082, 75.0567615, 0.0, 70.5615862, 0.0, 61.4495657, 48.7187783],
    [53.5460213, 75.0531148, 0.0, 69.9039783, 0.0, 61.7370555, 49.7598302],
    [54.8714544, 75.0467158, 0.0, 69.2674156, 0.0, 62.0204993, 50.793915],
    [56.1888264, 75.0385315, 0.0, 68.6514254, 0.0, 62.3004635, 51.8207532],
    [57.4974156, 75.0294503, 0.0, 68.0556025, 0.0, 62.5774248, 52.8401067],
    [58.7965394, 75.020309, 0.0, 67.4795877, 0.0, 62.8517848, 53.8517792],
    [60.0855359, 75.0119146, 0.0, 66.923052, 0.0, 63.123877, 54.8556204],
    [61.3637441, 75.0050713, 0.0, 66.3856776, 0.0, 63.3939748, 55.8515322],
    [62.6304884, 75.0005999, 0.0, 65.8671415, 0.0, 63.6623008, 56.8394695],
    [63.8850545, 74.9993676, 0.0, 65.3670975, 0.0, 63.9290246, 57.8194559],
    [65.1266704, 75.0023128, 0.0, 64.8851583, 0.0, 64.1942677, 58.7915908],
    [66.3544856, 75.0104716, 0.0, 64.4208772, 0.0, 64.4581041, 59.7560615],
    [67.5675485, 75.0250046, 0.0, 63.9737323, 0.0, 64.720556, 60.7131585],
    [68.7647815, 75.0472299, 0.0, 63.5431027, 0.0, 64.9815965, 61.6632893],
    [69.9449583, 75.0786509, 0.0, 63.1282512, 0.0, 65.2411462, 62.6069934],
    [71.1066845, 75.1209801, 0.0, 62.7283069, 0.0, 65.4990732, 63.5449553],
    [72.2483791, 75.1761634, 0.0, 62.3422486, 0.0, 65.7551933, 64.4780157],
    [73.2071285, 75.4051477, 0.0, 61.9213968, 0.0, 65.8757438, 65.5905832],
    [72.5564845, 77.2167735, 0.0, 61.0406061, 0.0, 64.6922101, 68.4939258],
    [71.9573903, 78.9575922, 0.0, 60.2219872, 0.0, 63.5379876, 71.3250427],
    [71.4116384, 80.623123, 0.0, 59.4704838, 0.0, 62.4086375, 74.0861172],
    [70.9200304, 82.2111663, 0.0, 58.7884438, 0.0, 61.3022815, 76.778078],
    [70.4819189, 83.7229764, 0.0, 58.1738409, 0.0, 60.2216237, 79.3996402],
    [70.0947582, 85.1644434, 0.0, 57.6183674, 0.0, 59.1762222, 81.9462087],
    [69.753804, 86.5469333, 0.0, 57.1058897, 0.0, 58.1844793, 84.4088938],
    [69.4521647, 87.8872817, 0.0, 56.6120107, 0.0, 57.2744747, 86.7740682],
    [69.1814505, 89.2063407, 0.0, 56.1056913, 0.0, 56.4824424, 89.0240751],
    [70.638243, 87.6843973, 0.0, 56.7234541, 0.0, 57.295139, 87.6587666],
    [72.0702294, 86.1999539, 0.0, 57.2994024, 0.0, 58.1558423, 86.2745721],
    [73.4861682, 84.7400074, 0.0, 57.8465831, 0.0, 59.0549168, 84.8723245],
    [74.8872297, 83.3010653, 0.0, 58.3712193, 0.0, 59.9838764, 83.4566093],
    [76.2754172, 81.8800287, 0.0, 58.8770949, 0.0, 60.9389268, 82.0285325],
    [77.6520854, 80.4753221, 0.0, 59.3659175, 0.0, 61.9186537, 80.5880213],
    [79.0180964, 79.0865513, 0.0, 59.8378455, 0.0, 62.9234165, 79.1340903],
    [80.3739076, 77.7143206, 0.0, 60.2917877, 0.0, 63.9550012, 77.6649829],
    [81.7196153, 76.3601605, 0.0, 60.7255508, 0.0, 65.0164457, 76.1782277],
    [83.054978, 75.0265042, 0.0, 61.1359214, 0.0, 66.1119416, 74.6706547],
];

/// Same at 120 mm.
pub(crate) const ROLL_FAR: [JointVector; 56] = [
    [23.8268272, 75.7362975, 0.0, 90.0, 0.0, 39.016172, 41.4207032],
    [24.6719691, 76.5611941, 0.0, 88.2663779, 0.0, 40.1884811, 42.3119779],
    [25.6870632, 77.1695286, 0.0, 86.7331092, 0.0, 41.1496612, 43.2606377],
    [26.8236412, 77.6188782, 0.0, 85.350195, 0.0, 41.9590491, 44.2482365],
    [28.0489386, 77.9480888, 0.0, 84.0841949, 0.0, 42.6560042, 45.2627735],
    [29.3397699, 78.1846236, 0.0, 82.9117132, 0.0, 43.2677815, 46.2961118],
    [30.6791502, 78.3486099, 0.0, 81.8158009, 0.0, 43.8138992, 47.3425399],
    [32.054306, 78.4552169, 0.0, 80.7838394, 0.0, 44.3087155, 48.3979221],
    [33.4554376, 78.516127, 0.0, 79.8062331, 0.0, 44.7630247, 49.4591776],
    [34.8749083, 78.5404934, 0.0, 78.8755607, 0.0, 45.1850893, 50.5239483],
    [36.3066951, 78.5355865, 0.0, 77.9860057, 0.0, 45.5813326, 51.5903801],
    [37.7460021, 78.5072444, 0.0, 77.1329622, 0.0, 45.9568141, 52.6569772],
    [39.1889839, 78.4601946, 0.0, 76.3127534, 0.0, 46.3155681, 53.7225],
    [40.6325373, 78.3982957, 0.0, 75.5224231, 0.0, 46.6608502, 54.7858937],
    [42.0741489, 78.3247128, 0.0, 74.7595842, 0.0, 46.9953165, 55.8462376],
    [43.511777, 78.2420547, 0.0, 74.0222999, 0.0, 47.3211626, 56.9027057],
    [44.9437607, 78.1524803, 0.0, 73.3089915, 0.0, 47.6402311, 57.9545363],
    [46.3687512, 78.0577779, 0.0, 72.6183696, 0.0, 47.9540918, 59.0010094],
    [47.7856557, 77.9594328, 0.0, 71.9493741, 0.0, 48.2641096, 60.0414277],
    [49.1935948, 77.8586789, 0.0, 71.3011278, 0.0, 48.5715009, 61.0750977],
    [50.5918692, 77.7565388, 0.0, 70.6728991, 0.0, 48.8773758, 62.1013172],
    [51.9799328, 77.6538601, 0.0, 70.0640668, 0.0, 49.1827815, 63.1193588],
    [53.3573726, 77.5513401, 0.0, 69.4740958, 0.0, 49.4887315, 64.12846],
    [54.7238887, 77.449555, 0.0, 68.9025077, 0.0, 49.7962389, 65.1278096],
    [56.0792834, 77.3489757, 0.0, 68.3488626, 0.0, 50.1063411, 66.1165372],
    [57.4234464, 77.2499898, 0.0, 67.8127366, 0.0, 50.4201227, 67.0937045],
    [58.7563453, 77.1529183, 0.0, 67.2937025, 0.0, 50.7387391, 68.0582948],
    [60.0780111, 77.058037, 0.0, 66.7913112, 0.0, 51.0634299, 69.0092108],
    [61.388527, 76.9655944, 0.0, 66.3050731, 0.0, 51.3955359, 69.9452697],
    [62.6880101, 76.8758381, 0.0, 65.834439, 0.0, 51.7365041, 70.8652088],
    [63.976595, 76.7890385, 0.0, 65.3787823, 0.0, 52.0878929, 71.7676912],
    [65.2544065, 76.7055244, 0.0, 64.9373784, 0.0, 52.4513675, 72.6513232],
    [66.5215306, 76.6257198, 0.0, 64.5093849, 0.0, 52.8286869, 73.5146778],
    [67.7779757, 76.5501914, 0.0, 64.0938197, 0.0, 53.2216834, 74.3563298],
    [69.023629, 76.4797002, 0.0, 63.6895399, 0.0, 53.6322314, 75.1748995],
    [70.2582039, 76.4152626, 0.0, 63.2952186, 0.0, 54.0622074, 75.9691075],
    [71.4811769, 76.3582221, 0.0, 62.9093182, 0.0, 54.5134411, 76.7378416],
    [72.6917297, 76.3103136, 0.0, 62.5300706, 0.0, 54.9876601, 77.480226],
    [73.8886801, 76.27374, 0.0, 62.1554495, 0.0, 55.4864345, 78.1956959],
    [75.0704229, 76.2512351, 0.0, 61.7831523, 0.0, 56.0111199, 78.8840698],
    [76.2348826, 76.2461125, 0.0, 61.4105844, 0.0, 56.5628103, 79.5456102],
    [77.2599998, 76.3896396, 0.0, 60.9922399, 0.0, 57.0494242, 80.3086964],
    [76.7491309, 78.1769209, 0.0, 60.0103505, 0.0, 56.418898, 82.6446997],
    [76.272552, 79.9382979, 0.0, 59.0096436, 0.0, 55.9186521, 84.8608544],
    [75.8256821, 81.6861607, 0.0, 57.9705965, 0.0, 55.5720784, 86.9454823],
    [75.4046328, 83.4319141, 0.0, 56.8743347, 0.0, 55.4015212, 88.8875972],
    [76.7161714, 82.1613484, 0.0, 57.1103894, 0.0, 56.7313597, 87.2807311],
    [78.0370551, 80.8571385, 0.0, 57.4010985, 0.0, 58.0012129, 85.7034949],
    [79.3615079, 79.5336433, 0.0, 57.7257375, 0.0, 59.234969, 84.1441423],
    [80.6859926, 78.2011665, 0.0, 58.0688087, 0.0, 60.4511751, 82.5928571],
    [82.007744, 76.8682701, 0.0, 58.4176872, 0.0, 61.6648775, 81.0414211],
    [83.3243979, 75.5426701, 0.0, 58.761341, 0.0, 62.8891531, 79.482438],
    [84.6337492, 74.2318388, 0.0, 59.0894944, 0.0, 64.1360931, 77.9088245],
    [85.9335969, 72.9434163, 0.0, 59.3920828, 0.0, 65.4174349, 76.3134692],
    [87.2216513, 71.6854749, 0.0, 59.6589198, 0.0, 66.7449422, 74.6890118],
    [88.4955015, 70.466642, 0.0, 59.8795596, 0.0, 68.1305643, 73.0277325],
];

/// Flat-foot path from the last far-roll pose to the canonical stance.
pub(crate) const STAND_PATH: [JointVector; 20] = [
    [88.5707265, 69.891297, 0.0, 60.8260596, 0.0, 66.835571, 73.8763459],
    [88.6459514, 69.3250825, 0.0, 61.7609578, 0.0, 65.5430491, 74.7249593],
    [88.7211763, 68.7678694, 0.0, 62.6846209, 0.0, 64.2527607, 75.5735726],
    [88.7964012, 68.2195448, 0.0, 63.5973855, 0.0, 62.9644826, 76.422186],
    [88.8716262, 67.6800096, 0.0, 64.4995601, 0.0, 61.6780047, 77.2707994],
    [88.9468511, 67.1491784, 0.0, 65.3914282, 0.0, 60.3931296, 78.1194128],
    [89.022076, 66.6269774, 0.0, 66.2732497, 0.0, 59.1096707, 78.9680261],
    [89.0973009, 66.1133444, 0.0, 67.1452632, 0.0, 57.827452, 79.8166395],
    [89.1725258, 65.6082269, 0.0, 68.0076877, 0.0, 56.5463066, 80.6652529],
    [89.2477508, 65.1115823, 0.0, 68.8607239, 0.0, 55.2660768, 81.5138663],
    [89.3229757, 64.6233764, 0.0, 69.7045558, 0.0, 53.9866125, 82.3624796],
    [89.3982006, 64.1435834, 0.0, 70.5393516, 0.0, 52.7077713, 83.211093],
    [89.4734255, 63.672185, 0.0, 71.3652653, 0.0, 51.4294178, 84.0597064],
    [89.5486505, 63.2091697, 0.0, 72.182437, 0.0, 50.1514231, 84.9083198],
    [89.6238754, 62.7545326, 0.0, 72.9909944, 0.0, 48.8736644, 85.7569331],
    [89.6991003, 62.3082751, 0.0, 73.7910534, 0.0, 47.5960247, 86.6055465],
    [89.7743252, 61.870404, 0.0, 74.5827187, 0.0, 46.3183922, 87.4541599],
    [89.8495502, 61.4409314, 0.0, 75.3660846, 0.0, 45.0406606, 88.3027733],
    [89.9247751, 61.0198745, 0.0, 76.1412356, 0.0, 43.7627281, 89.1513866],
    [90.0, 60.607255, 0.0, 76.9082471, 0.0, 42.4844978, 90.0],
];

// 15 mm foot lifts: right via (q5, q6), left via (q1, q3).
pub(crate) const LIFT_RIGHT_FAR: [f64; 2] = [-14.5730275, 21.0090596];
pub(crate) const LIFT_RIGHT_NEAR: [f64; 2] = [-17.1439775, 26.2672561];
pub(crate) const LIFT_LEFT_NEAR: [f64; 2] = [8.32323671, -5.77566045];
pub(crate) const LIFT_LEFT_FAR: [f64; 2] = [8.40496591, -5.93685815];
