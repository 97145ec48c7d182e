// Dialect continuum from acoustic-style feature sequences: DTW site
// distances, a three-dimensional MDS embedding and its RGB map.
//
// ```bash
// cargo run --example dtw_dialect_map
// ```

use geodialect::dialectometry::{
    classical_mds, dtw_distance, linguistic_distance_matrix, mds_to_rgb, FeatureSequence,
    SiteWordList,
};
use geodialect::eval::pearson;
use geodialect::geo::pairwise_distances;
use geodialect::{GeoPoint, Result, Site};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: usize = 5;

/// A word realised at position `t` in the continuum: a two-dimensional
/// contour whose shape and length drift with `t`.
fn pronounce(word: usize, t: f64, rng: &mut ChaCha8Rng) -> Result<FeatureSequence> {
    let len = 4 + (t * 3.0).round() as usize + word % 2;
    let frames = (0..len)
        .map(|i| {
            let x = i as f64 / len as f64;
            vec![
                (x * (2.0 + word as f64) + t).sin() + rng.gen_range(-0.05..0.05),
                t * x + 0.1 * word as f64 + rng.gen_range(-0.05..0.05),
            ]
        })
        .collect();
    FeatureSequence::new(frames)
}

pub fn run() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = FeatureSequence::from_scalars(&[0.0, 1.0, 2.0])?;
    let y = FeatureSequence::from_scalars(&[0.0, 2.0])?;
    println!("dtw([0,1,2], [0,2]) = {:.6}", dtw_distance(&x, &y)?);

    let n = 12;
    let mut sites = Vec::new();
    let mut lists = Vec::new();
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let id = format!("v{i:02}");
        sites.push(Site::new(&id, GeoPoint::new(44.0 + rng.gen_range(-0.3..0.3), 7.0 + 6.0 * t)?, 0.0)?);
        let words = (0..WORDS)
            .map(|w| {
                // Every site skips one word to show missing-data handling.
                if w == i % WORDS {
                    Ok(None)
                } else {
                    pronounce(w, t, &mut rng).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        lists.push(SiteWordList::new(id, words));
    }

    let ling = linguistic_distance_matrix(&lists)?;
    let geo = pairwise_distances(&sites)?;
    let (mut l, mut g) = (Vec::new(), Vec::new());
    for i in 0..n {
        for j in (i + 1)..n {
            l.push(ling.get(i, j));
            g.push(geo.get(i, j));
        }
    }
    println!("linguistic vs geographic distance: r = {:.3}", pearson(&l, &g)?);

    let emb = classical_mds(&ling, 3)?;
    println!("MDS stress {:.4}, eigenvalues {:?}", emb.stress, emb.eigenvalues);
    let rgb = mds_to_rgb(&emb)?;
    for (id, c) in emb.ids.iter().zip(&rgb) {
        println!("{id} #{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
