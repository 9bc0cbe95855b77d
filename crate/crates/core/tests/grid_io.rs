use std::io::BufReader;

use hypext::grid::{Axis, GridFunction};
use hypext::Error;
use num_complex::Complex64;

#[test]
fn text_round_trip_through_a_file() {
    let axes = vec![Axis::new(-2.0, 3.0, 7).unwrap(), Axis::symmetric(1.5, 5).unwrap()];
    let f = GridFunction::from_fn(axes, |x| Complex64::new(x[0].sin() * 1e-7, x[1].exp() * 3.3e5)).unwrap();
    let mut file = tempfile::tempfile().unwrap();
    f.write_text(&mut file).unwrap();
    use std::io::Seek;
    file.rewind().unwrap();
    let g = GridFunction::read_text(BufReader::new(file)).unwrap();
    assert_eq!(f, g);
}

#[test]
fn malformed_files_are_parse_errors() {
    for text in ["", "not a grid\n", "# hypext-grid v1\naxes x\n"] {
        let r = GridFunction::read_text(BufReader::new(text.as_bytes()));
        assert!(matches!(r, Err(Error::Parse(_))), "{text:?}: {r:?}");
    }
}
