// doubler
function doubler(xs) {
  let out = [];
  for (const x of xs) {
    out.push(x * 2);
  }
  return out;
}
