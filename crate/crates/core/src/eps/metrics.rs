//! Times-Roman advance widths (1000 units per em) in StandardEncoding.

const fn build() -> [u16; 256] {
    let mut w = [0u16; 256];
    let ascii: [u16; 95] = [
        250, 333, 408, 500, 500, 833, 778, 333, 333, 333, 500, 564, 250, 333, 250, 278, // 32..47
        500, 500, 500, 500, 500, 500, 500, 500, 500, 500, 278, 278, 564, 564, 564, 444, // 48..63
        921, 722, 667, 667, 722, 611, 556, 722, 722, 333, 389, 722, 611, 889, 722, 722, // 64..79
        556, 722, 667, 556, 611, 722, 722, 944, 722, 722, 611, 333, 278, 333, 469, 500, // 80..95
        333, 444, 500, 444, 500, 444, 333, 500, 500, 278, 278, 500, 278, 778, 500, 500, // 96..111
        500, 500, 333, 389, 278, 500, 500, 722, 500, 500, 444, 480, 200, 480, 541, // 112..126
    ];
    let mut i = 0;
    while i < ascii.len() {
        w[32 + i] = ascii[i];
        i += 1;
    }
    let high: [(usize, u16); 54] = [
        (161, 333), (162, 500), (163, 500), (164, 167), (165, 500), (166, 500), (167, 500),
        (168, 500), (169, 180), (170, 444), (171, 500), (172, 333), (173, 333), (174, 556),
        (175, 556), (177, 500), (178, 500), (179, 500), (180, 250), (182, 453), (183, 350),
        (184, 333), (185, 444), (186, 444), (187, 500), (188, 1000), (189, 1000), (191, 444),
        (193, 333), (194, 333), (195, 333), (196, 333), (197, 333), (198, 333), (199, 333),
        (200, 333), (202, 333), (203, 333), (205, 333), (206, 333), (207, 333), (208, 1000),
        (225, 889), (227, 276), (232, 611), (233, 722), (234, 889), (235, 310), (241, 667),
        (245, 278), (248, 278), (249, 500), (250, 722), (251, 500),
    ];
    let mut j = 0;
    while j < high.len() {
        w[high[j].0] = high[j].1;
        j += 1;
    }
    w
}

pub const TIMES_ROMAN_WIDTHS: [u16; 256] = build();

/// Ascender and descender of the estimated tag box, per unit font size.
pub const ASCENT: f64 = 0.683;
pub const DESCENT: f64 = 0.217;

/// Advance width of `bytes` set in Times-Roman at `size` points. Codes
/// without a glyph count as zero.
pub fn string_width(bytes: &[u8], size: f64) -> f64 {
    let units: u32 = bytes.iter().map(|&b| TIMES_ROMAN_WIDTHS[b as usize] as u32).sum();
    units as f64 * size / 1000.0
}
