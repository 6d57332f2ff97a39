package fixture;

public class F1 {
    int m0(int a, int b) {
        return a;
    }
    int m1(int a, int b) {
        if (a > b && b > 0) { a -= b; }
        for (int i = 0; i < b; i++) { a += i; }
        for (int i = 0; i < b; i++) { a += i; }
        if (a > b && b > 0) { a -= b; }
        return a;
    }
}
