// half-open integer range helpers
function range(limit) {
  const out = [];
  for (let i = 0; i < limit; i++) {
    out.push(i);
  }
  return out;
}

function sum(xs) {
  return xs.reduce((acc, x) => acc + x, 0);
}

module.exports = { range, sum };
