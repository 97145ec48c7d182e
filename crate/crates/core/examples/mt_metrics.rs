// Corpus-level chrF2 and BLEU for dialect transcriptions translated to
// the standard language, with several references per segment.
//
// ```bash
// cargo run --example mt_metrics
// ```

use geodialect::text_metrics::{bleu, chrf2, ScoredSegment};
use geodialect::Result;

pub fn run() -> Result<()> {
    let corpus = vec![
        ScoredSegment::new(
            "ieri sono andato al mercato",
            vec!["ieri sono andato al mercato".into()],
        )?,
        ScoredSegment::new(
            "la nonna fa il pane ogni mattina",
            vec![
                "la nonna prepara il pane ogni mattina".into(),
                "ogni mattina la nonna fa il pane".into(),
            ],
        )?,
        ScoredSegment::new(
            "il gatto dorme sul letto",
            vec!["il gatto sta dormendo sul letto".into()],
        )?,
    ];
    println!("chrF2 {:.3}", chrf2(&corpus)?);
    println!("BLEU  {:.3}", bleu(&corpus, 4)?);

    let hand = [ScoredSegment::new(
        "a b c d e",
        vec!["a b c d f".into()],
    )?];
    println!("hand-counted BLEU case: {:.3} (expected 66.874)", bleu(&hand, 4)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
