// mean of two values
package demo

func mean(a float64, b float64) float64 {
	return (a + b) / 2.0
}
