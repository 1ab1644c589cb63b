//! Transports isotropic planes by SO(q)-isometries and shows the two-orbit
//! obstruction for b2 = 4.

use hklab::quadratic::{default_tail, make_standard_space, witt_transport, IsotropicPlane};

fn main() -> hklab::Result<()> {
    for b2 in [4, 5, 6] {
        let space = make_standard_space(b2, &default_tail(b2))?;
        let e = |i: usize| {
            let mut v = vec![0i64; b2];
            v[i] = 1;
            v
        };
        let p1 = IsotropicPlane::from_ints(&space, &e(0), &e(2))?;
        let p2 = IsotropicPlane::from_ints(&space, &e(1), &e(3))?;
        let meeting = IsotropicPlane::from_ints(&space, &e(0), &e(3))?;
        let g = witt_transport(&space, &p1, &p2)?;
        g.validate(&space)?;
        println!("b2={b2}: <e0,e2> -> <e1,e3> det {}", g.matrix.det()?);
        match witt_transport(&space, &p1, &meeting) {
            Ok(g) => println!("b2={b2}: <e0,e2> -> <e0,e3> det {}", g.matrix.det()?),
            Err(err) => println!("b2={b2}: <e0,e2> -> <e0,e3> refused: {err}"),
        }
    }
    Ok(())
}
