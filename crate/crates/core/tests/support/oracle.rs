//! Literal, loop-by-loop transcription of the three encoder listings, using
//! plain `f64` arithmetic and string-based binary-to-decimal conversion.
//! It shares no code with the library and is only valid for short rows
//! (width ≤ 52, so `bin2dec` stays exact in `f64`).

pub struct OracleEncoding {
    pub classes: Vec<u32>,
    /// `memory[j]` is the symbol stored for class `j + 1`.
    pub memory: Vec<Option<String>>,
}

/// `reference` is the zero-based index of the row every row is matched
/// against (`j` in the listing).
pub fn encode(corpus: &[String], class_level: u32, reference: usize) -> OracleEncoding {
    // Symbol-integer transformation.
    let ro_bo = corpus.len();
    let lo_apno: Vec<usize> = corpus.iter().map(|s| s.chars().count()).collect();
    let co_bo = *lo_apno.iter().max().unwrap();
    let mut ap_store = vec![vec![0.0f64; co_bo]; ro_bo];
    for to_no in 0..ro_bo {
        let kodevo: Vec<f64> = corpus[to_no].chars().map(|c| c as u32 as f64).collect();
        for (col, k) in kodevo.iter().enumerate() {
            ap_store[to_no][col] = *k;
        }
    }

    // Swap-match: max over columns, then max of those maxima.
    let column_max: Vec<f64> = (0..co_bo)
        .map(|c| (0..ro_bo).map(|r| ap_store[r][c]).fold(f64::MIN, f64::max))
        .collect();
    let global_max = column_max.iter().copied().fold(f64::MIN, f64::max);
    let uoo: Vec<Vec<f64>> = ap_store
        .iter()
        .map(|row| row.iter().map(|v| v / global_max).collect())
        .collect();

    let j = reference;
    let mut ag_n_str_dec = vec![0.0f64; ro_bo];
    for i in 0..ro_bo {
        let agn: Vec<u8> = (0..co_bo).map(|c| (uoo[j][c] == uoo[i][c]) as u8).collect();
        let ag_n_str: String = agn.iter().map(|&b| char::from(b + 48)).collect();
        ag_n_str_dec[i] = bin2dec(&ag_n_str);
    }

    // Sensor-class memory.
    let max_dec = ag_n_str_dec.iter().copied().fold(f64::MIN, f64::max);
    let agn_class: Vec<u32> = ag_n_str_dec
        .iter()
        .map(|d| (class_level as f64).powf(d / max_dec).floor() as u32)
        .collect();
    let class_default: Vec<u32> = (1..=class_level).collect();
    let mut sensor_class_memory: Vec<Option<String>> = vec![None; class_level as usize];
    for i in 0..agn_class.len() {
        for jj in 0..class_level as usize {
            if agn_class[i] == class_default[jj] {
                sensor_class_memory[jj] = Some(corpus[i].clone());
            }
        }
    }

    OracleEncoding {
        classes: agn_class,
        memory: sensor_class_memory,
    }
}

fn bin2dec(s: &str) -> f64 {
    s.chars().fold(0.0, |acc, ch| acc * 2.0 + f64::from(ch as u32 - 48))
}
