"""Published reference-table values, used only by the test suite.

CELLS maps (table_id, block_label, maturity, spot) to the printed
(european, benchmark, order0, order1, order2, order3) prices.
RMSE maps (table_id, block_label) to the printed per-order RMSE
footer, already unscaled. MOD_QUAD holds the competitor column of
table 6 and its RMSE.
"""

CELLS = {
    # table 1
    (1, 'constant', 0.25, 80.0): (0.061, 0.062, 0.065, 0.057, 0.064, 0.062),
    (1, 'merton', 0.25, 80.0): (0.084, 0.086, 0.09, 0.081, 0.089, 0.086),
    (1, 'constant', 0.25, 90.0): (0.749, 0.764, 0.773, 0.757, 0.766, 0.766),
    (1, 'merton', 0.25, 90.0): (0.831, 0.849, 0.86, 0.843, 0.852, 0.851),
    (1, 'constant', 0.25, 100.0): (3.719, 3.833, 3.831, 3.822, 3.834, 3.835),
    (1, 'merton', 0.25, 100.0): (3.821, 3.939, 3.941, 3.932, 3.943, 3.944),
    (1, 'constant', 0.25, 110.0): (10.043, 10.525, 10.483, 10.516, 10.527, 10.527),
    (1, 'merton', 0.25, 110.0): (10.098, 10.572, 10.541, 10.571, 10.583, 10.583),
    (1, 'constant', 0.25, 120.0): (18.681, 20.0, 20.0, 20.0, 20.0, 20.0),
    (1, 'merton', 0.25, 120.0): (18.697, 20.0, 20.0, 20.0, 20.0, 20.0),
    (1, 'constant', 0.75, 80.0): (0.643, 0.671, 0.704, 0.65, 0.671, 0.68),
    (1, 'merton', 0.75, 80.0): (0.73, 0.763, 0.799, 0.742, 0.764, 0.772),
    (1, 'constant', 0.75, 90.0): (2.262, 2.394, 2.441, 2.368, 2.388, 2.401),
    (1, 'merton', 0.75, 90.0): (2.411, 2.555, 2.604, 2.53, 2.551, 2.563),
    (1, 'constant', 0.75, 100.0): (5.597, 6.035, 6.061, 6.001, 6.023, 6.037),
    (1, 'merton', 0.75, 100.0): (5.773, 6.225, 6.257, 6.196, 6.219, 6.232),
    (1, 'constant', 0.75, 110.0): (10.834, 11.972, 11.936, 11.935, 11.959, 11.97),
    (1, 'merton', 0.75, 110.0): (10.991, 12.126, 12.101, 12.098, 12.123, 12.133),
    (1, 'constant', 0.75, 120.0): (17.676, 20.149, 20.102, 20.138, 20.148, 20.151),
    (1, 'merton', 0.75, 120.0): (17.787, 20.201, 20.161, 20.2, 20.212, 20.215),
    (1, 'constant', 1.5, 80.0): (1.482, 1.623, 1.714, 1.587, 1.601, 1.637),
    (1, 'merton', 1.5, 80.0): (1.622, 1.779, 1.875, 1.743, 1.757, 1.795),
    (1, 'constant', 1.5, 90.0): (3.48, 3.901, 4.009, 3.859, 3.867, 3.906),
    (1, 'merton', 1.5, 90.0): (3.678, 4.126, 4.239, 4.086, 4.095, 4.135),
    (1, 'constant', 1.5, 100.0): (6.693, 7.718, 7.798, 7.667, 7.675, 7.713),
    (1, 'merton', 1.5, 100.0): (6.924, 7.977, 8.065, 7.931, 7.941, 7.979),
    (1, 'constant', 1.5, 110.0): (11.147, 13.292, 13.297, 13.236, 13.249, 13.279),
    (1, 'merton', 1.5, 110.0): (11.379, 13.53, 13.549, 13.482, 13.497, 13.527),
    (1, 'constant', 1.5, 120.0): (16.704, 20.712, 20.654, 20.675, 20.686, 20.702),
    (1, 'merton', 1.5, 120.0): (16.913, 20.857, 20.814, 20.83, 20.843, 20.861),
    # table 2
    (2, 'call', 0.25, 80.0): (0.105, 0.105, 0.106, 0.103, 0.107, 0.103),
    (2, 'put', 0.25, 80.0): (19.709, 20.004, 20.0, 20.004, 20.004, 20.003),
    (2, 'call', 0.25, 90.0): (0.982, 0.984, 0.988, 0.981, 0.987, 0.982),
    (2, 'put', 0.25, 90.0): (10.784, 10.852, 10.849, 10.847, 10.855, 10.849),
    (2, 'call', 0.25, 100.0): (4.304, 4.323, 4.328, 4.319, 4.327, 4.322),
    (2, 'put', 0.25, 100.0): (4.304, 4.315, 4.321, 4.311, 4.319, 4.313),
    (2, 'call', 0.25, 110.0): (10.964, 11.049, 11.045, 11.044, 11.053, 11.049),
    (2, 'put', 0.25, 110.0): (1.162, 1.164, 1.168, 1.16, 1.167, 1.161),
    (2, 'call', 0.25, 120.0): (19.814, 20.074, 20.063, 20.075, 20.08, 20.077),
    (2, 'put', 0.25, 120.0): (0.21, 0.21, 0.212, 0.207, 0.214, 0.207),
    (2, 'call', 0.75, 80.0): (1.012, 1.02, 1.038, 1.0, 1.034, 1.017),
    (2, 'put', 0.75, 80.0): (19.848, 20.495, 20.481, 20.475, 20.5, 20.493),
    (2, 'call', 0.75, 90.0): (3.149, 3.183, 3.213, 3.158, 3.197, 3.181),
    (2, 'put', 0.75, 90.0): (12.567, 12.816, 12.84, 12.786, 12.825, 12.815),
    (2, 'call', 0.75, 100.0): (7.171, 7.283, 7.319, 7.254, 7.296, 7.282),
    (2, 'put', 0.75, 100.0): (7.171, 7.262, 7.3, 7.232, 7.274, 7.261),
    (2, 'call', 0.75, 110.0): (13.114, 13.401, 13.426, 13.37, 13.413, 13.401),
    (2, 'put', 0.75, 110.0): (3.696, 3.728, 3.762, 3.699, 3.743, 3.726),
    (2, 'call', 0.75, 120.0): (20.571, 21.193, 21.19, 21.166, 21.204, 21.194),
    (2, 'put', 0.75, 120.0): (1.736, 1.746, 1.771, 1.719, 1.763, 1.743),
    (2, 'call', 1.5, 80.0): (2.499, 2.551, 2.624, 2.49, 2.574, 2.562),
    (2, 'put', 1.5, 80.0): (20.237, 21.488, 21.532, 21.432, 21.49, 21.491),
    (2, 'call', 1.5, 90.0): (5.333, 5.479, 5.582, 5.409, 5.498, 5.491),
    (2, 'put', 1.5, 90.0): (14.202, 14.82, 14.923, 14.748, 14.826, 14.829),
    (2, 'call', 1.5, 100.0): (9.542, 9.885, 10.003, 9.808, 9.898, 9.896),
    (2, 'put', 1.5, 100.0): (9.542, 9.846, 9.969, 9.769, 9.859, 9.86),
    (2, 'call', 1.5, 110.0): (15.037, 15.731, 15.841, 15.653, 15.74, 15.74),
    (2, 'put', 1.5, 110.0): (6.168, 6.317, 6.434, 6.238, 6.337, 6.334),
    (2, 'call', 1.5, 120.0): (21.596, 22.856, 22.931, 22.782, 22.862, 22.862),
    (2, 'put', 1.5, 120.0): (3.857, 3.93, 4.03, 3.851, 3.956, 3.947),
    # table 3
    (3, 'constant', 0.25, 80.0): (18.914, 20.0, 20.0, 20.0, 20.0, 20.0),
    (3, 'merton', 0.25, 80.0): (18.945, 20.0, 20.0, 20.0, 20.0, 20.0),
    (3, 'constant', 0.25, 90.0): (9.977, 10.371, 10.331, 10.365, 10.373, 10.37),
    (3, 'merton', 0.25, 90.0): (10.069, 10.43, 10.394, 10.425, 10.432, 10.429),
    (3, 'constant', 0.25, 100.0): (3.748, 3.832, 3.831, 3.824, 3.833, 3.83),
    (3, 'merton', 0.25, 100.0): (3.843, 3.917, 3.921, 3.912, 3.92, 3.916),
    (3, 'constant', 0.25, 110.0): (0.938, 0.95, 0.96, 0.945, 0.953, 0.949),
    (3, 'merton', 0.25, 110.0): (0.981, 0.992, 1.002, 0.987, 0.994, 0.99),
    (3, 'constant', 0.25, 120.0): (0.156, 0.158, 0.163, 0.152, 0.16, 0.157),
    (3, 'merton', 0.25, 120.0): (0.167, 0.168, 0.173, 0.162, 0.171, 0.167),
    (3, 'constant', 0.75, 80.0): (17.803, 20.0, 20.0, 20.0, 20.0, 20.0),
    (3, 'merton', 0.75, 80.0): (17.923, 20.008, 20.0, 20.0, 20.008, 20.008),
    (3, 'constant', 0.75, 90.0): (10.718, 11.606, 11.562, 11.578, 11.602, 11.606),
    (3, 'merton', 0.75, 90.0): (10.888, 11.736, 11.699, 11.709, 11.733, 11.736),
    (3, 'constant', 0.75, 100.0): (5.754, 6.092, 6.112, 6.065, 6.089, 6.095),
    (3, 'merton', 0.75, 100.0): (5.922, 6.247, 6.272, 6.221, 6.245, 6.25),
    (3, 'constant', 0.75, 110.0): (2.771, 2.893, 2.935, 2.869, 2.892, 2.897),
    (3, 'merton', 0.75, 110.0): (2.898, 3.015, 3.061, 2.992, 3.016, 3.02),
    (3, 'constant', 0.75, 120.0): (1.211, 1.253, 1.292, 1.23, 1.255, 1.258),
    (3, 'merton', 0.75, 120.0): (1.289, 1.329, 1.371, 1.306, 1.333, 1.335),
    (3, 'constant', 1.5, 80.0): (16.883, 20.204, 20.154, 20.187, 20.198, 20.202),
    (3, 'merton', 1.5, 80.0): (17.082, 20.279, 20.227, 20.26, 20.273, 20.278),
    (3, 'constant', 1.5, 90.0): (11.207, 12.84, 12.831, 12.794, 12.822, 12.839),
    (3, 'merton', 1.5, 90.0): (11.44, 13.027, 13.028, 12.982, 13.011, 13.028),
    (3, 'constant', 1.5, 100.0): (7.089, 7.888, 7.957, 7.841, 7.87, 7.892),
    (3, 'merton', 1.5, 100.0): (7.316, 8.101, 8.178, 8.054, 8.084, 8.107),
    (3, 'constant', 1.5, 110.0): (4.302, 4.691, 4.795, 4.647, 4.677, 4.701),
    (3, 'merton', 1.5, 110.0): (4.497, 4.883, 4.992, 4.838, 4.869, 4.894),
    (3, 'constant', 1.5, 120.0): (2.523, 2.712, 2.817, 2.668, 2.701, 2.726),
    (3, 'merton', 1.5, 120.0): (2.674, 2.862, 2.972, 2.818, 2.853, 2.878),
    # table 4
    (4, 'sigma02', 0.25, 40.5): (0.142, 0.142, 0.142, 0.142, 0.142, 0.142),
    (4, 'sigma04', 0.25, 40.5): (0.307, 0.307, 0.307, 0.307, 0.307, 0.307),
    (4, 'sigma02', 0.25, 42.5): (0.771, 0.771, 0.771, 0.771, 0.771, 0.771),
    (4, 'sigma04', 0.25, 42.5): (1.543, 1.543, 1.543, 1.542, 1.543, 1.543),
    (4, 'sigma02', 0.25, 45.0): (1.9, 1.9, 1.9, 1.9, 1.9, 1.9),
    (4, 'sigma04', 0.25, 45.0): (3.151, 3.151, 3.151, 3.15, 3.151, 3.151),
    (4, 'sigma02', 0.25, 47.5): (3.519, 3.519, 3.519, 3.519, 3.519, 3.519),
    (4, 'sigma04', 0.25, 47.5): (4.883, 4.883, 4.883, 4.882, 4.883, 4.883),
    (4, 'sigma02', 0.25, 50.0): (5.548, 5.548, 5.548, 5.548, 5.548, 5.547),
    (4, 'sigma04', 0.25, 50.0): (6.76, 6.76, 6.76, 6.759, 6.761, 6.76),
    (4, 'sigma02', 0.75, 40.5): (0.307, 0.307, 0.307, 0.307, 0.307, 0.307),
    (4, 'sigma04', 0.75, 40.5): (0.411, 0.411, 0.412, 0.411, 0.411, 0.411),
    (4, 'sigma02', 0.75, 42.5): (1.522, 1.522, 1.522, 1.521, 1.523, 1.521),
    (4, 'sigma04', 0.75, 42.5): (2.045, 2.046, 2.048, 2.044, 2.046, 2.046),
    (4, 'sigma02', 0.75, 45.0): (3.1, 3.1, 3.1, 3.099, 3.102, 3.099),
    (4, 'sigma04', 0.75, 45.0): (4.08, 4.081, 4.085, 4.078, 4.081, 4.081),
    (4, 'sigma02', 0.75, 47.5): (4.828, 4.828, 4.829, 4.826, 4.831, 4.827),
    (4, 'sigma04', 0.75, 47.5): (6.125, 6.126, 6.132, 6.122, 6.126, 6.126),
    (4, 'sigma02', 0.75, 50.0): (6.732, 6.732, 6.733, 6.729, 6.737, 6.731),
    (4, 'sigma04', 0.75, 50.0): (8.193, 8.195, 8.203, 8.19, 8.195, 8.195),
    (4, 'sigma02', 1.5, 40.5): (0.404, 0.404, 0.404, 0.403, 0.404, 0.404),
    (4, 'sigma04', 1.5, 40.5): (0.456, 0.457, 0.458, 0.456, 0.457, 0.457),
    (4, 'sigma02', 1.5, 42.5): (1.976, 1.976, 1.977, 1.972, 1.978, 1.977),
    (4, 'sigma04', 1.5, 42.5): (2.264, 2.269, 2.276, 2.266, 2.269, 2.269),
    (4, 'sigma02', 1.5, 45.0): (3.9, 3.9, 3.904, 3.893, 3.905, 3.903),
    (4, 'sigma04', 1.5, 45.0): (4.501, 4.51, 4.524, 4.506, 4.51, 4.51),
    (4, 'sigma02', 1.5, 47.5): (5.839, 5.84, 5.845, 5.829, 5.846, 5.843),
    (4, 'sigma04', 1.5, 47.5): (6.723, 6.736, 6.757, 6.73, 6.737, 6.737),
    (4, 'sigma02', 1.5, 50.0): (7.829, 7.829, 7.837, 7.815, 7.837, 7.834),
    (4, 'sigma04', 1.5, 50.0): (8.937, 8.957, 8.983, 8.948, 8.957, 8.957),
    # table 5
    (5, 'sigma02', 0.25, 40.0): (4.981, 5.105, 5.089, 5.104, 5.106, 5.105),
    (5, 'sigma04', 0.25, 40.0): (6.039, 6.096, 6.084, 6.092, 6.098, 6.097),
    (5, 'sigma02', 0.25, 42.5): (3.055, 3.11, 3.1, 3.108, 3.11, 3.11),
    (5, 'sigma04', 0.25, 42.5): (4.319, 4.355, 4.347, 4.351, 4.355, 4.355),
    (5, 'sigma02', 0.25, 45.0): (1.621, 1.644, 1.641, 1.642, 1.644, 1.644),
    (5, 'sigma04', 0.25, 45.0): (2.77, 2.791, 2.787, 2.789, 2.791, 2.791),
    (5, 'sigma02', 0.25, 47.5): (0.666, 0.673, 0.673, 0.673, 0.673, 0.673),
    (5, 'sigma04', 0.25, 47.5): (1.349, 1.358, 1.356, 1.357, 1.358, 1.358),
    (5, 'sigma02', 0.25, 49.5): (0.122, 0.123, 0.123, 0.123, 0.123, 0.123),
    (5, 'sigma04', 0.25, 49.5): (0.267, 0.268, 0.268, 0.268, 0.268, 0.268),
    (5, 'sigma02', 0.75, 40.0): (5.296, 5.552, 5.529, 5.544, 5.552, 5.553),
    (5, 'sigma04', 0.75, 40.0): (6.716, 6.877, 6.868, 6.866, 6.875, 6.879),
    (5, 'sigma02', 0.75, 42.5): (3.663, 3.811, 3.798, 3.804, 3.811, 3.812),
    (5, 'sigma04', 0.75, 42.5): (4.961, 5.072, 5.067, 5.063, 5.071, 5.074),
    (5, 'sigma02', 0.75, 45.0): (2.272, 2.351, 2.346, 2.347, 2.352, 2.352),
    (5, 'sigma04', 0.75, 45.0): (3.265, 3.335, 3.332, 3.329, 3.334, 3.336),
    (5, 'sigma02', 0.75, 47.5): (1.073, 1.107, 1.105, 1.105, 1.107, 1.108),
    (5, 'sigma04', 0.75, 47.5): (1.615, 1.649, 1.648, 1.646, 1.649, 1.65),
    (5, 'sigma02', 0.75, 49.5): (0.208, 0.214, 0.214, 0.214, 0.214, 0.214),
    (5, 'sigma04', 0.75, 49.5): (0.321, 0.328, 0.327, 0.327, 0.328, 0.328),
    (5, 'sigma02', 1.5, 40.0): (5.396, 5.856, 5.842, 5.845, 5.853, 5.857),
    (5, 'sigma04', 1.5, 40.0): (6.789, 7.131, 7.142, 7.122, 7.126, 7.13),
    (5, 'sigma02', 1.5, 42.5): (3.86, 4.152, 4.146, 4.142, 4.149, 4.154),
    (5, 'sigma04', 1.5, 42.5): (5.04, 5.285, 5.294, 5.277, 5.28, 5.284),
    (5, 'sigma02', 1.5, 45.0): (2.466, 2.637, 2.635, 2.63, 2.635, 2.638),
    (5, 'sigma04', 1.5, 45.0): (3.329, 3.487, 3.493, 3.481, 3.483, 3.486),
    (5, 'sigma02', 1.5, 47.5): (1.187, 1.266, 1.265, 1.262, 1.264, 1.266),
    (5, 'sigma04', 1.5, 47.5): (1.65, 1.727, 1.731, 1.725, 1.726, 1.727),
    (5, 'sigma02', 1.5, 49.5): (0.231, 0.246, 0.246, 0.246, 0.246, 0.246),
    (5, 'sigma04', 1.5, 49.5): (0.328, 0.343, 0.344, 0.343, 0.343, 0.343),
    # table 7
    (7, 'sigma02', 0.5, 35.0): (14.829, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma04', 0.5, 35.0): (14.81, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma02', 0.5, 40.0): (9.966, 10.013, 10.02, 10.012, 10.017, 10.013),
    (7, 'sigma04', 0.5, 40.0): (9.918, 10.006, 10.012, 10.006, 10.006, 10.006),
    (7, 'sigma02', 0.5, 45.0): (5.046, 5.055, 5.062, 5.054, 5.058, 5.055),
    (7, 'sigma04', 0.5, 45.0): (4.985, 5.017, 5.022, 5.018, 5.017, 5.017),
    (7, 'sigma02', 0.5, 48.0): (2.025, 2.027, 2.029, 2.027, 2.028, 2.027),
    (7, 'sigma04', 0.5, 48.0): (2.0, 2.008, 2.009, 2.008, 2.008, 2.008),
    (7, 'sigma02', 0.5, 48.5): (1.514, 1.515, 1.516, 1.515, 1.515, 1.515),
    (7, 'sigma04', 0.5, 48.5): (1.5, 1.504, 1.505, 1.504, 1.504, 1.504),
    (7, 'sigma02', 1.0, 35.0): (14.647, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma04', 1.0, 35.0): (14.575, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma02', 1.0, 40.0): (9.889, 10.02, 10.036, 10.02, 10.028, 10.02),
    (7, 'sigma04', 1.0, 40.0): (9.775, 10.006, 10.014, 10.006, 10.006, 10.006),
    (7, 'sigma02', 1.0, 45.0): (5.027, 5.064, 5.078, 5.065, 5.071, 5.065),
    (7, 'sigma04', 1.0, 45.0): (4.924, 5.017, 5.023, 5.018, 5.017, 5.017),
    (7, 'sigma02', 1.0, 48.0): (2.021, 2.03, 2.033, 2.03, 2.031, 2.03),
    (7, 'sigma04', 1.0, 48.0): (1.985, 2.008, 2.009, 2.008, 2.008, 2.008),
    (7, 'sigma02', 1.0, 48.5): (1.512, 1.516, 1.518, 1.516, 1.517, 1.516),
    (7, 'sigma04', 1.0, 48.5): (1.493, 1.504, 1.505, 1.504, 1.504, 1.504),
    (7, 'sigma02', 1.5, 35.0): (14.45, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma04', 1.5, 35.0): (14.319, 15.0, 15.0, 15.0, 15.0, 15.0),
    (7, 'sigma02', 1.5, 40.0): (9.786, 10.021, 10.044, 10.023, 10.021, 10.021),
    (7, 'sigma04', 1.5, 40.0): (9.614, 10.006, 10.014, 10.006, 10.006, 10.006),
    (7, 'sigma02', 1.5, 45.0): (4.987, 5.067, 5.085, 5.068, 5.066, 5.066),
    (7, 'sigma04', 1.5, 45.0): (4.852, 5.017, 5.023, 5.018, 5.017, 5.017),
    (7, 'sigma02', 1.5, 48.0): (2.011, 2.03, 2.035, 2.031, 2.03, 2.03),
    (7, 'sigma04', 1.5, 48.0): (1.967, 2.008, 2.009, 2.008, 2.008, 2.008),
    (7, 'sigma02', 1.5, 48.5): (1.507, 1.516, 1.519, 1.517, 1.516, 1.516),
    (7, 'sigma04', 1.5, 48.5): (1.484, 1.504, 1.505, 1.504, 1.504, 1.504),
}

RMSE = {
    (1, 'constant'): (0.051, 0.031, 0.021, 0.007),
    (1, 'merton'): (0.052, 0.027, 0.017, 0.008),
    (2, 'call'): (0.058, 0.045, 0.012, 0.006),
    (2, 'put'): (0.061, 0.045, 0.012, 0.008),
    (3, 'constant'): (0.049, 0.027, 0.008, 0.005),
    (3, 'merton'): (0.052, 0.027, 0.008, 0.006),
    (4, 'sigma02'): (0.0028000000000000004, 0.0052, 0.0033000000000000004, 0.0018),
    (4, 'sigma04'): (0.0099, 0.0036, 0.0004, 0.00030000000000000003),
    (5, 'sigma02'): (0.009500000000000001, 0.0054, 0.0014000000000000002, 0.0007000000000000001),
    (5, 'sigma04'): (0.006200000000000001, 0.0057, 0.0024000000000000002, 0.0008),
    (7, 'sigma02'): (0.00978, 0.0005600000000000001, 0.00304, 0.00021),
    (7, 'sigma04'): (0.00428, 0.00031, 3e-05, 2e-05),
}

# table 6 competitor column: (maturity, spot) -> printed price
MOD_QUAD = {
    (0.25, 40.0): 5.09,
    (0.25, 42.5): 3.101,
    (0.25, 45.0): 1.641,
    (0.25, 47.5): 0.673,
    (0.25, 49.5): 0.123,
    (0.75, 40.0): 5.537,
    (0.75, 42.5): 3.805,
    (0.75, 45.0): 2.351,
    (0.75, 47.5): 1.108,
    (0.75, 49.5): 0.214,
    (1.5, 40.0): 5.87,
    (1.5, 42.5): 4.169,
    (1.5, 45.0): 2.651,
    (1.5, 47.5): 1.274,
    (1.5, 49.5): 0.248,
}
MOD_QUAD_RMSE = 0.009300000000000001
TABLE6_RMSE = (0.009500000000000001, 0.0054, 0.0014000000000000002, 0.0007000000000000001)
