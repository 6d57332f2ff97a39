package fixture;

public class F1 {
    int m0(int a, int b) {
        a = b > 3 ? a : b; // pick
        for (int i = 0; i < b; i++) { a += i; }
        a = b > 3 ? a : b; // pick
        for (int i = 0; i < b; i++) { a += i; }
        return a;
    }
    int m1(int a, int b) {
        if (a > b && b > 0) { a -= b; }
        if (a > b && b > 0) { a -= b; }
        if (a > b && b > 0) { a -= b; }
        if (a > b && b > 0) { a -= b; }
        return a;
    }
}
