// Generated by tools/gen_photopic_table.py. Do not edit.
#include "photopic_table.hpp"

namespace camsim::detail {

const std::array<double, kPhotopicCount> kPhotopic1nm = {
    3.9e-05, 4.28177148e-05, 4.68668019e-05, 5.14401761e-05, 5.70369761e-05, 6.4e-05,
    7.23590813e-05, 8.22661665e-05, 9.36298258e-05, 0.000106225485, 0.00012, 0.000135112,
    0.0001515664, 0.0001700688, 0.0001916592, 0.000217, 0.0002464864, 0.0002811008,
    0.0003191872, 0.0003579216, 0.000396, 0.0004345072, 0.0004736912, 0.0005174272,
    0.0005715232, 0.00064, 0.00072376, 0.0008250512, 0.0009420624, 0.0010708816,
    0.00121, 0.0013627008, 0.0015316544, 0.0017208, 0.0019353056, 0.00218,
    0.002456368, 0.002764432, 0.003115136, 0.00352384, 0.004, 0.004543424,
    0.005156656, 0.005830288, 0.00654824, 0.0073, 0.00808736, 0.008909728,
    0.009767776, 0.010664064, 0.0116, 0.012573536, 0.013582816, 0.014629056,
    0.015714496, 0.01684, 0.018005696, 0.019213856, 0.020456416, 0.021720736,
    0.023, 0.024297216, 0.025612736, 0.026957696, 0.028349376, 0.0298,
    0.031310272, 0.032882816, 0.03452064, 0.036225664, 0.038, 0.03984656,
    0.04176752, 0.04376528, 0.04584224, 0.048, 0.050241568, 0.05257232,
    0.054983872, 0.057461984, 0.06, 0.062604832, 0.065280832, 0.068042272,
    0.070909792, 0.0739, 0.077017344, 0.080266592, 0.08366416, 0.087230368,
    0.09098, 0.09491648, 0.0990432, 0.10336448, 0.1078832, 0.1126,
    0.117523552, 0.12267152, 0.128006048, 0.133465856, 0.13902, 0.14468944,
    0.150482528, 0.156459136, 0.162709344, 0.1693, 0.176242176, 0.183555296,
    0.191270016, 0.199416096, 0.20802, 0.217112384, 0.226730976, 0.236867008,
    0.24749152, 0.2586, 0.270209248, 0.282303808, 0.295015488, 0.308542528,
    0.323, 0.338363936, 0.354650848, 0.3717144, 0.389317152, 0.4073,
    0.42565568, 0.44432544, 0.463368, 0.48290896, 0.503, 0.52354832,
    0.5444856, 0.56568448, 0.58697216, 0.6082, 0.62932, 0.65030128,
    0.67092176, 0.69088624, 0.71, 0.72823272, 0.74551016, 0.7619556,
    0.77780384, 0.7932, 0.80809408, 0.8224824, 0.83631592, 0.84950584,
    0.862, 0.8738204, 0.88497152, 0.89549024, 0.90543616, 0.91485,
    0.92373144, 0.93208904, 0.93992344, 0.94722744, 0.954, 0.96025544,
    0.96600664, 0.97126024, 0.97602184, 0.9803, 0.98410328, 0.98743544,
    0.9903276, 0.99282296, 0.99495, 0.99670896, 0.998104, 0.99912784,
    0.99976408, 1, 0.99983976, 0.99928904, 0.99832192, 0.9969,
    0.995, 0.99262464, 0.98976952, 0.9864572, 0.98272568, 0.9786,
    0.9740784, 0.9691664, 0.9638576, 0.9581376, 0.952, 0.94545328,
    0.9385016, 0.93116112, 0.92345504, 0.9154, 0.90700256, 0.89827552,
    0.88921008, 0.87978704, 0.87, 0.85986592, 0.84939728, 0.83862224,
    0.8275792, 0.8163, 0.8047968, 0.79308224, 0.78118768, 0.76915072,
    0.757, 0.74474976, 0.73241808, 0.7200048, 0.70749952, 0.6949,
    0.68222112, 0.6694728, 0.65667248, 0.64384256, 0.631, 0.6181528,
    0.60531248, 0.59247776, 0.57964064, 0.5668, 0.55396512, 0.54113936,
    0.528348, 0.51562704, 0.503, 0.4904656, 0.4780256, 0.4656752,
    0.4534032, 0.4412, 0.42907232, 0.4170336, 0.40504448, 0.39304416,
    0.381, 0.36892928, 0.35683968, 0.34477728, 0.33281248, 0.321,
    0.30934496, 0.29785088, 0.2865792, 0.27561152, 0.265, 0.25474912,
    0.2448752, 0.23533728, 0.22606176, 0.217, 0.20816288, 0.19955168,
    0.19115808, 0.18297568, 0.175, 0.16722624, 0.15964928, 0.15227712,
    0.14512416, 0.1382, 0.13150112, 0.12502432, 0.11877632, 0.11276672,
    0.107, 0.101473248, 0.09618576, 0.091123872, 0.086266944, 0.0816,
    0.077121152, 0.072826432, 0.068710752, 0.064769952, 0.061, 0.057396512,
    0.053955712, 0.050674432, 0.047549952, 0.04458, 0.041760512, 0.039085632,
    0.036561152, 0.034197792, 0.032, 0.029960544, 0.028073952, 0.02632864,
    0.024708608, 0.0232, 0.021798288, 0.0205004, 0.019285232, 0.018124704,
    0.017, 0.0159079088, 0.014841336, 0.0138097232, 0.0128320864, 0.01192,
    0.0110676864, 0.0102724352, 0.009532808, 0.0088461328, 0.00821, 0.0076233984,
    0.00708492, 0.0065913296, 0.0061385792, 0.005723, 0.0053426032, 0.0049956496,
    0.004677136, 0.0043807904, 0.004102, 0.0038390944, 0.003589832, 0.0033542416,
    0.0031337872, 0.002929, 0.002738112, 0.0025598976, 0.0023933472, 0.0022373568,
    0.002091, 0.001953656, 0.0018246832, 0.0017036304, 0.0015901856, 0.001484,
    0.001384544, 0.0012913184, 0.0012040848, 0.0011227152, 0.001047, 0.0009765648,
    0.0009111008, 0.0008501728, 0.0007932768, 0.00074, 0.0006901088, 0.0006433568,
    0.0005995328, 0.0005584688, 0.00052, 0.0004839248, 0.0004500528, 0.0004183008,
    0.0003886368, 0.000361, 0.0003352528, 0.0003112768, 0.0002889728, 0.0002682448,
    0.000249, 0.00023114848, 0.0002146032, 0.00019928192, 0.00018510624, 0.000172,
    0.00015988832, 0.00014869952, 0.00013836512, 0.00012881952, 0.00012, 0.00011184896,
    0.00010431392, 9.733408e-05, 9.084704e-05, 8.48e-05, 7.915328e-05, 7.386688e-05,
    6.891968e-05, 6.430208e-05, 6e-05, 5.5984e-05, 5.222848e-05, 4.871936e-05,
    4.544704e-05, 4.24e-05, 3.956128e-05, 3.691616e-05, 3.445024e-05, 3.214912e-05,
    3e-05, 2.79892486e-05, 2.61004831e-05, 2.43349175e-05, 2.27015089e-05, 2.12e-05,
    1.98123468e-05, 1.85230668e-05, 1.73096299e-05, 1.61438714e-05, 1.5e-05,
};

}  // namespace camsim::detail
