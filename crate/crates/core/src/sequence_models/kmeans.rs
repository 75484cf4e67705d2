use rand::Rng;

/// Lloyd's k-means on scalars with k-means++ seeding. Returns `k` sorted
/// centroids. With fewer than `k` distinct values the distinct values are
/// returned, cycled to length `k`.
pub fn kmeans_1d<R: Rng + ?Sized>(data: &[f64], k: usize, rng: &mut R) -> Vec<f64> {
    assert!(k > 0 && !data.is_empty(), "kmeans needs data and k > 0");
    let mut distinct: Vec<f64> = data.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= k {
        return (0..k).map(|i| distinct[i % distinct.len()]).collect();
    }

    // k-means++ seeding
    let mut centroids = Vec::with_capacity(k);
    centroids.push(data[rng.random_range(0..data.len())]);
    let mut d2: Vec<f64> = data.iter().map(|x| (x - centroids[0]).powi(2)).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = data.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            data[chosen]
        } else {
            data[rng.random_range(0..data.len())]
        };
        centroids.push(next);
        for (slot, x) in d2.iter_mut().zip(data) {
            *slot = slot.min((x - next).powi(2));
        }
    }

    let mut assign = vec![0usize; data.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (a, x) in assign.iter_mut().zip(data) {
            let best = nearest(&centroids, *x);
            if best != *a {
                *a = best;
                changed = true;
            }
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (a, x) in assign.iter().zip(data) {
            sums[*a] += x;
            counts[*a] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c] / counts[c] as f64;
            } else {
                // re-seed an empty cluster at the worst-fit point
                let (far, _) = data
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (i, (x - centroids[assign[i]]).abs()))
                    .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
                centroids[c] = data[far];
                assign[far] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    centroids.sort_by(f64::total_cmp);
    centroids
}

fn nearest(centroids: &[f64], x: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = (x - c).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}
